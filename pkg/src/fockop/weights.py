"""Admissible weights on the plane, the radius function rho and its metric.

Laplacian convention: the Euclidean one, d^2/dx^2 + d^2/dy^2, so that
Delta(|z|^2 / 2) = 2 and Delta(|z|^4) = 16 |z|^2.
"""

import csv
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError, RadiusUnboundedError, WeightError
from .geometry import Box, disk_sup
from .quadrature import DEFAULT_DISK_RULE


@dataclass(frozen=True)
class Weight:
    """A weight phi on C (n = 1) together with its Laplacian.

    ``phi`` and ``laplacian`` take complex arrays and return real arrays of
    the same shape. Radial kinds also carry profiles in r = |z|; these unlock
    the diagonal kernel model and exact disk suprema (when the Laplacian
    profile is nondecreasing).
    """

    phi: Callable
    laplacian: Callable
    kind: str = "custom"
    params: tuple = ()
    n: int = 1
    radial_phi: Optional[Callable] = None
    radial_laplacian: Optional[Callable] = None
    laplacian_nondecreasing: bool = False
    domain: Optional[Box] = None

    @property
    def name(self):
        if not self.params:
            return self.kind
        return f"{self.kind}:" + ",".join(f"{p:g}" for p in self.params)

    @property
    def is_radial(self):
        return self.radial_phi is not None

    def laplacian_sup(self, z, r):
        """sup of the Laplacian over D(z, r), vectorized over z and r."""
        if self.radial_laplacian is not None and self.laplacian_nondecreasing:
            z = np.asarray(z)
            return self.radial_laplacian(np.abs(z) + r)
        return disk_sup(self.laplacian, z, r)


def gaussian(m=1.0):
    """phi = m |z|^2 / 2, constant Laplacian 2m."""
    if m <= 0:
        raise ParameterError("gaussian weight needs m > 0")
    m = float(m)
    return Weight(
        phi=lambda z: 0.5 * m * np.abs(z) ** 2,
        laplacian=lambda z: np.full(np.shape(z), 2.0 * m),
        kind="gaussian",
        params=(m,),
        radial_phi=lambda r: 0.5 * m * np.asarray(r) ** 2,
        radial_laplacian=lambda r: np.full(np.shape(r), 2.0 * m),
        laplacian_nondecreasing=True,
    )


def radial_poly(a2, a4):
    """phi = a2 |z|^2 + a4 |z|^4, Laplacian 4 a2 + 16 a4 |z|^2."""
    a2, a4 = float(a2), float(a4)
    if a2 < 0 or a4 < 0 or a2 + a4 == 0:
        raise ParameterError("radial-poly weight needs a2, a4 >= 0, not both zero")

    def prof(r):
        r2 = np.asarray(r, dtype=float) ** 2
        return a2 * r2 + a4 * r2 ** 2

    def lap(r):
        return 4.0 * a2 + 16.0 * a4 * np.asarray(r, dtype=float) ** 2

    return Weight(
        phi=lambda z: prof(np.abs(z)),
        laplacian=lambda z: lap(np.abs(z)),
        kind="radial-poly",
        params=(a2, a4),
        radial_phi=prof,
        radial_laplacian=lap,
        laplacian_nondecreasing=True,
    )


def from_csv(path):
    """Custom weight sampled on a rectangular grid (CSV columns x, y, phi).

    phi is interpolated by a bicubic spline; the Laplacian is the spline's.
    Values outside the sampled rectangle are NaN.
    """
    from scipy.interpolate import RectBivariateSpline

    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader(fh)]
    try:
        pts = np.array([(float(r["x"]), float(r["y"]), float(r["phi"])) for r in rows])
    except (KeyError, ValueError) as exc:
        raise WeightError(f"{path}: expected numeric columns x,y,phi ({exc})") from None
    xs = np.unique(pts[:, 0])
    ys = np.unique(pts[:, 1])
    if xs.size * ys.size != pts.shape[0] or xs.size < 4 or ys.size < 4:
        raise WeightError(f"{path}: samples must form a full rectangular grid (>= 4x4)")
    table = np.full((xs.size, ys.size), np.nan)
    table[np.searchsorted(xs, pts[:, 0]), np.searchsorted(ys, pts[:, 1])] = pts[:, 2]
    spline = RectBivariateSpline(xs, ys, table)
    dom = Box(xs[0], xs[-1], ys[0], ys[-1])

    def _ev(z, **kw):
        z = np.asarray(z, dtype=complex)
        out = spline.ev(z.real, z.imag, **kw)
        out = np.where(dom.contains(z), out, np.nan)
        return out.reshape(z.shape)

    return Weight(
        phi=_ev,
        laplacian=lambda z: _ev(z, dx=2) + _ev(z, dy=2),
        kind="custom",
        params=(),
        domain=dom,
    )


def from_id(text):
    """Parse 'gaussian:m', 'radial-poly:a2,a4' or 'custom:<csv path>'."""
    text = text.strip()
    head, _, rest = text.partition(":")
    try:
        if head == "gaussian":
            return gaussian(float(rest) if rest else 1.0)
        if head == "radial-poly":
            a2, a4 = (float(v) for v in rest.split(","))
            return radial_poly(a2, a4)
    except ValueError:
        raise ParameterError(f"bad weight parameters in {text!r}") from None
    if head == "custom" and rest:
        return from_csv(rest)
    raise ParameterError(f"unknown weight id {text!r}")


def fd_laplacian(weight, z, h=1e-3):
    """Five-point finite-difference Laplacian of phi."""
    z = np.asarray(z, dtype=complex)
    p = weight.phi
    return (p(z + h) + p(z - h) + p(z + 1j * h) + p(z - 1j * h) - 4.0 * p(z)) / h ** 2


def _require_finite(values, points, what):
    bad = ~np.isfinite(values)
    if np.any(bad):
        z = np.asarray(points)[bad].ravel()[0]
        raise WeightError(f"non-finite {what} at z = {z.real:g}{z.imag:+g}i")


@dataclass(frozen=True)
class AdmissibilityReport:
    inf_sup_laplacian: float
    reverse_holder_constant: float
    eigenvalue_ratio: float
    probe_c: float
    verdict: dict

    @property
    def admissible(self):
        return all(self.verdict.values())

    def rows(self):
        return [
            ("inf_sup_laplacian", self.inf_sup_laplacian),
            ("reverse_holder_constant", self.reverse_holder_constant),
            ("eigenvalue_ratio", self.eigenvalue_ratio),
            ("probe_c", self.probe_c),
            ("verdict_I", int(self.verdict["I"])),
            ("verdict_II", int(self.verdict["II"])),
            ("verdict_III", int(self.verdict["III"])),
        ]


def reverse_holder_ratio(weight, z, r):
    """sup of the Laplacian on D(z, r) divided by its area mean there."""
    z = np.asarray(z, dtype=complex)
    sup = weight.laplacian_sup(z, r)
    mean = DEFAULT_DISK_RULE.mean(weight.laplacian, z, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        return sup / mean


def check_admissibility(weight, box, probe_c=1.0, resolution=41,
                        radii=(0.25, 0.5, 1.0, 2.0)):
    """Probe the three admissibility conditions on a uniform grid over ``box``.

    Condition (II) is normalised by disk area, so a constant Laplacian
    gives C = 1. For n = 1 the Hessian is scalar and (III) holds with ratio 1.
    """
    if probe_c <= 0:
        raise ParameterError("probe_c must be positive")
    grid = box.grid(resolution)
    _require_finite(weight.phi(grid), grid, "phi")
    _require_finite(weight.laplacian(grid), grid, "laplacian")

    sups = weight.laplacian_sup(grid, probe_c)
    _require_finite(sups, grid, "laplacian (disk sup)")
    inf_sup = float(np.min(sups))

    worst = 0.0
    for r in radii:
        ratio = reverse_holder_ratio(weight, grid, r)
        if not np.all(np.isfinite(ratio)):
            worst = np.inf
            break
        worst = max(worst, float(np.max(ratio)))
    verdict = {"I": inf_sup > 0, "II": bool(np.isfinite(worst)), "III": True}
    return AdmissibilityReport(inf_sup, worst, 1.0, float(probe_c), verdict)


@dataclass
class RadiusField:
    """The radius function of a weight, memoized per point.

    rho(z) = sup{r > 0 : r^2 sup_{D(z,r)} Laplacian <= 1}. The memo is guarded
    by a lock, so a field can be shared between threads.
    """

    weight: Weight
    max_steps: int = 80
    bisection_steps: int = 60
    _memo: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def _g(self, z, r):
        return r * r * self.weight.laplacian_sup(z, r)

    def _solve(self, z):
        r = np.ones(z.shape)
        g = self._g(z, r)
        if np.any(~np.isfinite(g)):
            _require_finite(g, z, "laplacian")
        lo = np.where(g <= 1.0, r, 0.0)
        hi = np.where(g > 1.0, r, np.inf)
        for _ in range(self.max_steps):
            up = np.isinf(hi)
            down = lo == 0.0
            if not (up.any() or down.any()):
                break
            trial = np.where(up, 2.0 * lo, np.where(down, 0.5 * hi, 1.0))
            gt = self._g(z, trial)
            active = up | down
            if not np.all(np.isfinite(gt[active])):
                bad = z[active & ~np.isfinite(gt)][0]
                raise WeightError(
                    f"Laplacian undefined on the bracketing disk D(z, {trial[active & ~np.isfinite(gt)][0]:g}) "
                    f"at z = {bad.real:g}{bad.imag:+g}i (outside the sampled domain?)")
            above = gt > 1.0
            hi = np.where((up | down) & above, trial, hi)
            lo = np.where((up | down) & ~above, trial, lo)
        if np.isinf(hi).any():
            bad = z[np.isinf(hi)][0]
            raise RadiusUnboundedError(
                f"radius unbounded near z = {bad.real:g}{bad.imag:+g}i: "
                "Laplacian vanishes on every probed disk")
        if (lo == 0.0).any():
            bad = z[lo == 0.0][0]
            raise WeightError(f"radius collapses to 0 near z = {bad.real:g}{bad.imag:+g}i")
        if not self.weight.laplacian_nondecreasing:
            lo, hi = self._rightmost_crossing(z, lo, hi)
        for _ in range(self.bisection_steps):
            mid = 0.5 * (lo + hi)
            above = self._g(z, mid) > 1.0
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        return lo

    def _rightmost_crossing(self, z, lo, hi, samples=33):
        t = np.linspace(0.0, 1.0, samples)
        rs = lo[:, None] + (hi - lo)[:, None] * t[None, :]
        g = self._g(np.repeat(z[:, None], samples, axis=1), rs)
        ok = g <= 1.0
        # last index j with g(r_j) <= 1; hi side is always > 1
        j = samples - 1 - np.argmax(ok[:, ::-1], axis=1)
        j = np.minimum(j, samples - 2)
        rows = np.arange(z.size)
        return rs[rows, j], rs[rows, j + 1]

    def rho(self, z):
        """rho at a point or an array of points."""
        scalar = np.ndim(z) == 0
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        flat = zz.ravel()
        out = np.empty(flat.shape)
        with self._lock:
            missing = []
            for i, v in enumerate(flat.tolist()):
                hit = self._memo.get(v)
                if hit is None:
                    missing.append(i)
                else:
                    out[i] = hit
        if missing:
            idx = np.array(missing)
            todo, inverse = np.unique(flat[idx], return_inverse=True)
            vals = self._solve(todo)
            out[idx] = vals[inverse]
            with self._lock:
                self._memo.update(zip(todo.tolist(), vals.tolist()))
        out = out.reshape(zz.shape)
        return float(out[0]) if scalar else out

    __call__ = rho

    def sup_bound(self, box, resolution=41):
        """Empirical sup of rho over a probe grid (the constant M)."""
        return float(np.max(self.rho(box.grid(resolution))))

    def growth_exponents(self, box, resolution=41):
        """Fit log rho against log|z| for |z| > 1; returns (A, B) >= 0."""
        g = box.grid(resolution)
        g = g[np.abs(g) > 1.0]
        if g.size < 2:
            return 0.0, 0.0
        slope = np.polyfit(np.log(np.abs(g)), np.log(self.rho(g)), 1)[0]
        return float(max(-slope, 0.0)), float(max(slope, 0.0))


def radius_rho(field, z):
    return field.rho(z)


def rho_distance(field, z, w, refine=False, subdivisions=64):
    """|z - w| / rho(z); with ``refine`` the rho-length of the segment [z, w].

    The refined value integrates 1/rho along the segment with the midpoint
    rule in both orientations and keeps the smaller sum.
    """
    z, w = complex(z), complex(w)
    if z == w:
        return 0.0
    if not refine:
        return abs(z - w) / field.rho(z)
    t = (np.arange(subdivisions) + 0.5) / subdivisions
    step = abs(w - z) / subdivisions
    fwd = step * np.sum(1.0 / field.rho(z + t * (w - z)))
    bwd = step * np.sum(1.0 / field.rho(w + t * (z - w)))
    return float(min(fwd, bwd))


def doubling_measure(field, z, r):
    """mu(D(z, r)) = r^2 sup_{D(z,r)} Laplacian."""
    if r <= 0:
        raise ParameterError("radius must be positive")
    return float(r * r * field.weight.laplacian_sup(np.asarray(complex(z)), r))
