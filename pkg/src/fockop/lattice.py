"""delta-lattices adapted to rho, overlap diagnostics and separated partitions."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .geometry import Box


@dataclass(frozen=True)
class Lattice:
    points: np.ndarray
    delta: float
    box: Box
    radius_field: object
    rho: np.ndarray
    probe_resolution: int = 201

    def __len__(self):
        return self.points.size

    def probe_grid(self):
        return self.box.grid(self.probe_resolution)

    def multiplicity(self, scale, probes=None):
        """Number of disks D(z_k, scale * rho(z_k)) containing each probe point."""
        p = self.probe_grid() if probes is None else np.asarray(probes)
        count = np.zeros(p.shape, dtype=int)
        for z, r in zip(self.points, scale * self.rho):
            count += np.abs(p - z) < r
        return count

    def covering_violations(self, probes=None):
        return int(np.sum(self.multiplicity(self.delta, probes) == 0))

    def packing_violations(self, probes=None):
        return int(np.sum(self.multiplicity(self.delta / 5.0, probes) > 1))

    def without(self, index):
        keep = np.arange(self.points.size) != index
        return Lattice(self.points[keep], self.delta, self.box, self.radius_field,
                       self.rho[keep], self.probe_resolution)


def build_lattice(field, box, delta, probe_resolution=201):
    """Greedy delta-lattice over ``box``.

    Candidates come from a sub-grid of the probe grid whose spacing is the
    largest probe multiple not exceeding (delta/5) min rho, scanned row-major
    after the box centre. A candidate is accepted when no existing disk
    D^delta(z_k) contains it; since rho is 1-Lipschitz this already keeps the
    D^{delta/5} disks disjoint. Remaining holes on the probe grid are filled
    in probe order, which keeps both properties.
    """
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    if probe_resolution < 3 or probe_resolution % 2 == 0:
        raise ParameterError("probe_resolution must be odd and >= 3")
    probes = box.grid(probe_resolution)
    n = probe_resolution
    hx = box.width / (n - 1)
    hy = box.height / (n - 1)
    rho_min = float(np.min(field.rho(box.grid(41))))
    step = max(1, int(math.floor((delta / 5.0) * rho_min / max(hx, hy))))
    idx = np.arange(0, n, step)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    I, J = np.meshgrid(idx, idx)            # J: row (y), I: column (x)
    order = (J * n + I).ravel()
    centre = (n // 2) * n + n // 2
    order = np.concatenate([[centre], order[order != centre]])
    cand = probes[order]
    cand_rho = field.rho(cand)

    pts = np.empty(cand.size, dtype=complex)
    rads = np.empty(cand.size)
    count = 0
    for c, rc in zip(cand, cand_rho):
        if count and np.any(np.abs(pts[:count] - c) < rads[:count]):
            continue
        pts[count] = c
        rads[count] = delta * rc
        count += 1
    pts, rads = list(pts[:count]), list(rads[:count])

    covered = np.zeros(probes.size, dtype=bool)
    for z, r in zip(pts, rads):
        covered |= np.abs(probes - z) < r
    while not covered.all():
        h = probes[np.argmax(~covered)]
        r = delta * field.rho(h)
        pts.append(h)
        rads.append(r)
        covered |= np.abs(probes - h) < r
    pts = np.array(pts, dtype=complex)
    return Lattice(pts, float(delta), box, field, np.array(rads) / delta, probe_resolution)


@dataclass(frozen=True)
class LatticeDiagnostics:
    overlap_N: int
    m1: float
    m2: float
    beta: float
    count: int
    m: float = 1.0

    def rows(self):
        return [("count", self.count), ("m", self.m), ("overlap_N", self.overlap_N),
                ("m1", self.m1), ("m2", self.m2), ("beta", self.beta)]


def dilation_constants(field, z, r, samples=64, seed=0):
    """Smallest m1, m2 with D^r(z) in D^{m1 r}(w) and D^r(w) in D^{m2 r}(z), w in D^r(z)."""
    rng = np.random.default_rng(seed)
    z = np.asarray(z, dtype=complex).ravel()
    rz = field.rho(z)
    rad = r * rz[:, None] * np.sqrt(rng.random((z.size, samples)))
    ang = 2.0 * np.pi * rng.random((z.size, samples))
    w = z[:, None] + rad * np.exp(1j * ang)
    rw = field.rho(w)
    dist = np.abs(w - z[:, None])
    m1 = np.max((dist + r * rz[:, None]) / (r * rw))
    m2 = np.max((dist + r * rw) / (r * rz[:, None]))
    return float(m1), float(m2)


def diagnostics(lat, m=1.0, r_values=(0.1, 0.3, 0.5, 0.7, 0.9), samples=64, seed=0):
    """Overlap number on the probe grid plus empirical dilation constants."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    overlap = int(np.max(lat.multiplicity(m * lat.delta)))
    m1 = m2 = beta = 0.0
    for i, r in enumerate(r_values):
        a, b = dilation_constants(lat.radius_field, lat.points, r, samples, seed + i)
        m1, m2, beta = max(m1, a), max(m2, b), max(beta, a + b)
    return LatticeDiagnostics(overlap, m1, m2, beta, len(lat), float(m))


@dataclass(frozen=True)
class SeparatedPartition:
    classes: list
    R: float
    M_R: int
    max_degree: int
    lemma_bound: float = None
    lemma_bound_ok: bool = None


def close_graph(points, rho, R):
    d = np.abs(points[:, None] - points[None, :])
    close = d < R * np.minimum(rho[:, None], rho[None, :])
    np.fill_diagonal(close, False)
    return close


def partition_separated(points, field, R, lattice=None):
    """Greedy colouring of the 'close' graph into R-separated classes.

    When ``lattice`` is given, the class count is compared against
    6^{2n} R^{4n} delta^{-2n} N_delta with N_delta the probe-grid overlap.
    """
    if R <= 1:
        raise ParameterError("R must exceed 1")
    points = np.asarray(points, dtype=complex).ravel()
    if np.unique(points).size != points.size:
        raise ParameterError("points must be pairwise distinct")
    rho = field.rho(points)
    close = close_graph(points, rho, R)
    colour = np.full(points.size, -1)
    for i in range(points.size):
        used = set(colour[close[i]].tolist())
        c = 0
        while c in used:
            c += 1
        colour[i] = c
    M = int(colour.max()) + 1 if points.size else 0
    classes = [np.flatnonzero(colour == c).tolist() for c in range(M)]
    deg = int(close.sum(axis=1).max()) if points.size else 0
    bound = ok = None
    if lattice is not None:
        n = 1
        N = int(np.max(lattice.multiplicity(lattice.delta)))
        bound = 6.0 ** (2 * n) * R ** (4 * n) * lattice.delta ** (-2 * n) * N
        ok = M <= bound
    return SeparatedPartition(classes, float(R), M, deg, bound, ok)


def is_separated(points, rho, R, members):
    p = points[members]
    r = rho[members]
    return not close_graph(p, r, R).any()


def write_lattice_csv(lat, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "x", "y", "rho"])
        for i, (z, r) in enumerate(zip(lat.points, lat.rho)):
            w.writerow([i, f"{z.real:.12e}", f"{z.imag:.12e}", f"{r:.12e}"])


def read_lattice_csv(path, field, delta, box, probe_resolution=201):
    with open(path, newline="") as fh:
        rows = sorted(csv.DictReader(fh), key=lambda r: int(r["index"]))
    pts = np.array([float(r["x"]) + 1j * float(r["y"]) for r in rows])
    rho = np.array([float(r["rho"]) for r in rows])
    return Lattice(pts, float(delta), box, field, rho, probe_resolution)
