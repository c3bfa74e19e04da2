"""Harness computing every side of the boundedness, compactness and Schatten
characterizations for a family of symbols, with empirical constants."""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import weights as wt
from .errors import ParameterError
from .geometry import Box
from .kernel import build_kernel_model, choose_r_max
from .lattice import build_lattice
from .quadrature import QuadratureGrid
from .toeplitz import assemble_toeplitz, carleson_matrix, spectral_report
from .transforms import (averaging_operator, averaging_scalar, berezin_from_blocks,
                         sorted_eigh)

STABILITY = 0.20
REFINEMENT_AXES = ("quadrature", "lattice", "box")


def basis_for_radius(weight, radius, start=16, tol=1e-10):
    """Smallest basis size (multiple of 8, >= start) whose reliable radius covers ``radius``."""
    K = start
    while K <= 512:
        m = build_kernel_model(weight, K, n_radial=64, n_angular=8)
        if m.reliable_radius(tol) >= radius:
            return K
        K += 8
    raise ParameterError(f"no basis size up to 512 is reliable out to |z| = {radius:g}")


@dataclass
class Setup:
    """Shared weight, kernel model, grids and lattice for one experiment."""

    weight_id: str = "gaussian:1"
    box: Box = field(default_factory=lambda: Box.square(3.0))
    delta: float = 0.45
    basis_size: int = 64
    d: int = 2
    n_radial: int = 200
    n_angular: int = 128
    grid_resolution: int = 41
    probe_resolution: int = 201
    reach: float = 0.0
    radius_field: wt.RadiusField = None
    model: object = None
    lattice: object = None

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ParameterError("delta must lie in (0, 1)")
        self.weight = wt.from_id(self.weight_id)
        if self.radius_field is None:
            self.radius_field = wt.RadiusField(self.weight)
        corner = max(abs(complex(x, y)) for x in (self.box.xmin, self.box.xmax)
                     for y in (self.box.ymin, self.box.ymax))
        need = max(corner, self.reach)
        K = max(self.basis_size, basis_for_radius(self.weight, need)) if self.weight.is_radial \
            else self.basis_size
        if self.model is None or self.model.basis_size != K:
            r_max = choose_r_max(self.weight, K) if self.weight.is_radial else None
            quad = QuadratureGrid(r_max, self.n_radial, self.n_angular)
            self.model = build_kernel_model(self.weight, K, quad)
        if self.lattice is None:
            self.lattice = build_lattice(self.radius_field, self.box, self.delta,
                                         self.probe_resolution)

    @property
    def K(self):
        return self.model.basis_size

    def grid(self):
        return self.box.grid(self.grid_resolution)

    def cell_grid(self):
        return self.box.cell_grid(self.grid_resolution)

    def with_basis(self, K):
        return replace(self, basis_size=K, model=None, lattice=self.lattice)

    def refined(self, axis):
        """(a) 'quadrature': nodes and grids doubled; (b) 'lattice': delta halved;
        (c) 'box': box grown by 1 on each side."""
        keep = dict(radius_field=self.radius_field)
        if axis == "quadrature":
            return replace(self, n_radial=2 * self.n_radial, n_angular=2 * self.n_angular,
                           grid_resolution=2 * self.grid_resolution - 1,
                           model=None, lattice=self.lattice, **keep)
        if axis == "lattice":
            return replace(self, delta=self.delta / 2.0, model=self.model, lattice=None, **keep)
        if axis == "box":
            return replace(self, box=self.box.grown(1.0), model=None, lattice=None, **keep)
        raise ParameterError(f"unknown refinement axis {axis!r}")


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _warm(setup):
    setup.model.weighted_basis()
    setup.radius_field.rho(setup.grid())


# --- boundedness -----------------------------------------------------------

QUANTITIES = ("norm_T", "sup_berezin", "sup_average", "sup_lattice_average", "carleson")


@dataclass(frozen=True)
class BoundednessRow:
    symbol: str
    decay: str
    q: tuple
    max_ratio: float

    @property
    def finite(self):
        return all(math.isfinite(v) for v in self.q)


@dataclass(frozen=True)
class BoundednessReport:
    rows: list
    delta: float

    @property
    def constant(self):
        """Largest pairwise ratio between the five quantities across the family."""
        return max(r.max_ratio for r in self.rows)

    @property
    def inconsistent(self):
        return [r.symbol for r in self.rows if r.decay != "unbounded" and not r.finite]


def bounded_quantities(setup, G):
    T = assemble_toeplitz(setup.model, G)
    q1 = float(np.linalg.eigvalsh(T.matrix)[-1])
    M = carleson_matrix(setup.model, G)
    grid = setup.grid()
    btil = berezin_from_blocks(setup.model, M[None, None], grid)[..., 0, 0].real
    q2 = float(btil.max())
    q3 = float(averaging_scalar(setup.radius_field, G, grid, setup.delta).max())
    q4 = float(averaging_scalar(setup.radius_field, G, setup.lattice.points, setup.delta).max())
    q5 = float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[-1])
    return (q1, q2, q3, q4, q5)


def boundedness_report(setup, symbols, threads=1):
    _warm(setup)

    def one(G):
        q = bounded_quantities(setup, G)
        lo = min(q)
        ratio = max(q) / lo if lo > 0 else math.inf
        return BoundednessRow(G.name, G.decay, q, ratio)

    return BoundednessReport(_map(one, symbols, threads), setup.delta)


def refinement_study(setup, symbols, threads=1, axes=REFINEMENT_AXES):
    """Base boundedness report plus one report per refinement axis."""
    base = boundedness_report(setup, symbols, threads)
    return base, {a: boundedness_report(setup.refined(a), symbols, threads) for a in axes}


def relative_change(a, b):
    return abs(b - a) / abs(a) if a else (0.0 if b == 0 else math.inf)


# --- compactness -----------------------------------------------------------

INDICATORS = ("berezin_rings", "average_rings", "lattice_tail", "sigma_tail")


@dataclass(frozen=True)
class CompactnessRow:
    symbol: str
    decay: str
    rings: tuple
    berezin_profile: tuple        # ring maxima of G~
    average_profile: tuple        # ring maxima of G^_delta
    reference: dict               # indicator -> value at z = 0 (sigma_1 for the spectrum)
    tail: dict                    # indicator -> outer value
    tail_index: int
    decays: dict                  # indicator -> bool

    @property
    def verdict(self):
        v = list(self.decays.values())
        if all(v):
            return "compact-consistent"
        if not any(v):
            return "non-compact-consistent"
        return "mixed"


@dataclass(frozen=True)
class CompactnessReport:
    rows: list
    threshold: float

    @property
    def mixed(self):
        return [r.symbol for r in self.rows if r.verdict == "mixed"]


def compact_setup(setup, rings=(2.0, 3.0, 4.0, 5.0)):
    """A setup whose model is reliable out to the outer ring and whose lattice reaches past it."""
    return replace(setup, box=Box.square(rings[-1] + 0.5), reach=rings[-1],
                   model=None, lattice=None, radius_field=setup.radius_field)


def compactness_report(setup, symbols, rings=(2.0, 3.0, 4.0, 5.0), ring_samples=32,
                       threshold=1e-3, threads=1):
    """Decay of G~, G^_delta (rings), lattice values and singular values, per symbol.

    An indicator decays when its outer value is below ``threshold`` times its
    value at the origin (sigma_1 for the spectrum, whose outer value is
    sigma at index K d / 2).
    """
    cs = compact_setup(setup, rings)
    _warm(cs)
    model, field, delta = cs.model, cs.radius_field, cs.delta
    theta = 2.0 * np.pi * np.arange(ring_samples) / ring_samples
    ring_pts = np.concatenate([[0j]] + [r * np.exp(1j * theta) for r in rings])
    lat = cs.lattice
    tail_sel = np.abs(lat.points) >= rings[-1]
    origin = int(np.argmin(np.abs(lat.points)))

    def one(G):
        M = carleson_matrix(model, G)
        bt = berezin_from_blocks(model, M[None, None], ring_pts)[..., 0, 0].real
        av = averaging_scalar(field, G, ring_pts, delta)
        bprof = tuple(float(bt[1 + i * ring_samples: 1 + (i + 1) * ring_samples].max())
                      for i in range(len(rings)))
        aprof = tuple(float(av[1 + i * ring_samples: 1 + (i + 1) * ring_samples].max())
                      for i in range(len(rings)))
        latv = averaging_scalar(field, G, lat.points, delta)
        T = assemble_toeplitz(model, G)
        sp = spectral_report(T, (1.0,))
        sig = sp.singular_values
        half = (T.basis_size * T.d) // 2
        ref = {"berezin_rings": float(bt[0]), "average_rings": float(av[0]),
               "lattice_tail": float(latv[origin]), "sigma_tail": float(sig[0])}
        tail = {"berezin_rings": bprof[-1], "average_rings": aprof[-1],
                "lattice_tail": float(latv[tail_sel].max()) if tail_sel.any() else 0.0,
                "sigma_tail": float(sig[min(half, sig.size - 1)])}
        decays = {k: bool(tail[k] < threshold * ref[k]) for k in INDICATORS}
        return CompactnessRow(G.name, G.decay, tuple(rings), bprof, aprof, ref, tail,
                              sp.tail_index, decays)

    return CompactnessReport(_map(one, symbols, threads), threshold)


# --- Schatten classes ------------------------------------------------------

SCHATTEN_SIDES = ("I2_berezin", "I3_average", "S4_lattice", "schatten_sum")


def _clip_pow(x, p):
    return np.maximum(np.real(x), 0.0) ** p


def schatten_quantities(setup, G, p_set, basis_override=None):
    """The four sides of the Schatten characterization for each p in ``p_set``.

    I2, I3 integrate against dA / rho^2 with the midpoint rule on the cell
    grid; the orthonormal frame at each point is the eigenbasis of the
    averaging operator there. S4 sums over the lattice in its own eigenbases.
    """
    field, model, delta = setup.radius_field, setup.model, setup.delta
    pts, cell = setup.cell_grid()
    vol = cell / field.rho(pts) ** 2
    avg = averaging_operator(field, G, pts, delta)
    lam, vecs = sorted_eigh(avg)
    T = assemble_toeplitz(model, G)
    bop = berezin_from_blocks(model, T.blocks, pts)
    bdiag = np.einsum("pnm,pnq,pmq->pq", bop, vecs.conj(), vecs)
    lat = setup.lattice
    lam_j, _ = sorted_eigh(averaging_operator(field, G, lat.points, delta))
    if basis_override is not None:
        T = assemble_toeplitz(basis_override, G)
    sigma = spectral_report(T, p_set).singular_values
    out = {}
    for p in p_set:
        out[float(p)] = {
            "I2_berezin": float(np.sum(_clip_pow(bdiag, p).sum(axis=1) * vol)),
            "I3_average": float(np.sum(_clip_pow(lam, p).sum(axis=1) * vol)),
            "S4_lattice": float(np.sum(_clip_pow(lam_j, p))),
            "schatten_sum": float(np.sum(sigma ** p)),
        }
    return out


def s4_in_basis(field, G, points, delta, p, basis="eigen"):
    """Lattice sum of <G^op e_m, e_m>^p in the eigenbasis or the standard basis."""
    mats = averaging_operator(field, G, np.asarray(points), delta)
    if basis == "eigen":
        diag = sorted_eigh(mats)[0]
    elif basis == "standard":
        diag = np.einsum("jmm->jm", mats)
    else:
        raise ParameterError(f"unknown basis {basis!r}")
    return float(np.sum(_clip_pow(diag, p)))


@dataclass(frozen=True)
class SchattenRow:
    symbol: str
    decay: str
    p: float
    base: dict
    grown: dict
    finite: dict                  # side -> bool
    s4_inner: float = math.nan    # grown-lattice sum restricted to the base box

    @property
    def verdict(self):
        v = list(self.finite.values())
        if all(v):
            return "schatten-consistent"
        if not any(v):
            return "divergent-consistent"
        return "mixed"

    @property
    def lattice_ratio(self):
        s = self.base["schatten_sum"]
        return self.base["S4_lattice"] / s if s else math.inf


@dataclass(frozen=True)
class SchattenReport:
    rows: list

    @property
    def mixed(self):
        return [(r.symbol, r.p) for r in self.rows if r.verdict == "mixed"]


def schatten_report(setup, symbols, p_set=(0.5, 1.0, 2.0), threads=1, growth=STABILITY):
    """Finiteness of each side judged by growth when the box grows by 1 on every
    side (integrals, lattice sum) and the basis size doubles (Schatten sum).

    The lattice sum is compared on a single lattice, the one built on the
    grown box, against its points inside the base box; two independently
    built lattices differ near the origin by more than the tail mass.
    """
    if any(p <= 0 for p in p_set):
        raise ParameterError("p must be positive")
    grown = setup.refined("box")
    big = build_kernel_model(grown.weight, 2 * grown.K, n_radial=setup.n_radial,
                             n_angular=setup.n_angular)
    _warm(setup)
    _warm(grown)

    inner = setup.box.contains(grown.lattice.points)

    def one(G):
        a = schatten_quantities(setup, G, p_set)
        b = schatten_quantities(grown, G, p_set, basis_override=big)
        lam, _ = sorted_eigh(averaging_operator(grown.radius_field, G,
                                                grown.lattice.points[inner], grown.delta))
        rows = []
        for p in p_set:
            p = float(p)
            ref = dict(a[p], S4_lattice=float(np.sum(_clip_pow(lam, p))))
            fin = {s: bool(math.isfinite(b[p][s]) and b[p][s] <= (1.0 + growth) * ref[s])
                   for s in SCHATTEN_SIDES}
            rows.append(SchattenRow(G.name, G.decay, p, a[p], b[p], fin, ref["S4_lattice"]))
        return rows

    return SchattenReport([r for rows in _map(one, symbols, threads) for r in rows])


# --- chain inequalities ----------------------------------------------------

def comparison_constant(setup, G, grid=None):
    """max over the grid of G^_delta / G~."""
    grid = setup.grid() if grid is None else grid
    M = carleson_matrix(setup.model, G)
    bt = berezin_from_blocks(setup.model, M[None, None], grid)[..., 0, 0].real
    av = averaging_scalar(setup.radius_field, G, grid, setup.delta)
    ok = bt > 1e-300
    return float(np.max(av[ok] / bt[ok]))


def star_constant(setup, G, samples=20, modes=16, seed=0, rhs_quad=None):
    """Largest ||T_G f||^2 / int ||f||^2 e^{-2phi} G^_delta^2 dA over random f.

    f has i.i.d. complex normal coefficients on the first ``modes`` basis
    functions in every coordinate.
    """
    model, field = setup.model, setup.radius_field
    if rhs_quad is None:
        rhs_quad = QuadratureGrid(min(model.r_max, 8.0), 64, 64).with_breaks(G.breaks)
    T = assemble_toeplitz(model, G)
    rng = np.random.default_rng(seed)
    w = rhs_quad.nodes
    avg2 = averaging_scalar(field, G, w, setup.delta) ** 2
    dens = rhs_quad.weights * np.exp(-2.0 * model.weight.phi(w)) * avg2
    Fw = model.basis(w)
    worst = 0.0
    for _ in range(samples):
        c = np.zeros((model.basis_size, G.d), dtype=complex)
        c[:modes] = rng.standard_normal((modes, G.d)) + 1j * rng.standard_normal((modes, G.d))
        lhs = float(np.sum(np.abs(T.apply(c)) ** 2))
        vals = np.sum(np.abs(Fw @ c) ** 2, axis=1)
        rhs = float(vals @ dens)
        worst = max(worst, lhs / rhs)
    return worst


# --- output ----------------------------------------------------------------

def _fmt(v):
    return f"{v:.12e}" if isinstance(v, float) else str(v)


def write_bounded_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["symbol", "decay", *QUANTITIES, "max_ratio"])
        for r in report.rows:
            w.writerow([r.symbol, r.decay, *(_fmt(v) for v in r.q), _fmt(r.max_ratio)])


def write_compact_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        head = ["symbol", "decay"]
        for k in INDICATORS:
            head += [f"{k}_ref", f"{k}_tail", f"{k}_decays"]
        w.writerow(head + ["tail_index", "verdict"])
        for r in report.rows:
            row = [r.symbol, r.decay]
            for k in INDICATORS:
                row += [_fmt(r.reference[k]), _fmt(r.tail[k]), int(r.decays[k])]
            w.writerow(row + ["" if r.tail_index is None else r.tail_index, r.verdict])


def write_ring_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["symbol", "ring", "berezin_max", "average_max"])
        for r in report.rows:
            for rad, b, a in zip(r.rings, r.berezin_profile, r.average_profile):
                w.writerow([r.symbol, _fmt(float(rad)), _fmt(b), _fmt(a)])


def write_schatten_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        head = ["symbol", "decay", "p"]
        for s in SCHATTEN_SIDES:
            head += [f"{s}", f"{s}_grown", f"{s}_finite"]
        w.writerow(head + ["lattice_ratio", "verdict"])
        for r in report.rows:
            row = [r.symbol, r.decay, _fmt(r.p)]
            for s in SCHATTEN_SIDES:
                row += [_fmt(r.base[s]), _fmt(r.grown[s]), int(r.finite[s])]
            w.writerow(row + [_fmt(r.lattice_ratio), r.verdict])


def summary_table(report):
    """Fixed-width text table for a boundedness report."""
    head = f"{'symbol':28s}" + "".join(f"{q:>20s}" for q in QUANTITIES) + f"{'max_ratio':>12s}"
    lines = [head, "-" * len(head)]
    for r in report.rows:
        lines.append(f"{r.symbol:28s}" + "".join(f"{v:20.6g}" for v in r.q)
                     + f"{r.max_ratio:12.4g}")
    return "\n".join(lines)
