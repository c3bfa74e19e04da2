"""Polar Gauss-Legendre quadrature on discs centred at the origin and on small disks."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


def _gauss_legendre(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor rule on D(0, r_max): composite Gauss-Legendre in r, uniform in angle.

    ``breaks`` splits the radial interval into panels, each with ``n_radial``
    nodes, so radial jump discontinuities are integrated without smearing.
    ``weights`` include the polar Jacobian r dr dtheta.
    """

    r_max: float
    n_radial: int = 200
    n_angular: int = 128
    breaks: tuple = ()
    radii: np.ndarray = field(init=False, repr=False, compare=False)
    radial_weights: np.ndarray = field(init=False, repr=False, compare=False)
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.r_max <= 0 or self.n_radial < 1 or self.n_angular < 1:
            raise ParameterError("quadrature sizes must be positive")
        cuts = sorted(b for b in set(self.breaks) if 0.0 < b < self.r_max)
        edges = [0.0, *cuts, float(self.r_max)]
        rs, ws = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            r, w = _gauss_legendre(self.n_radial, a, b)
            rs.append(r)
            ws.append(w)
        r = np.concatenate(rs)
        w = np.concatenate(ws)
        theta = 2.0 * np.pi * np.arange(self.n_angular) / self.n_angular
        nodes = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
        weights = np.repeat(w * r * (2.0 * np.pi / self.n_angular), self.n_angular)
        object.__setattr__(self, "breaks", tuple(cuts))
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "radial_weights", w)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    def with_breaks(self, breaks):
        extra = tuple(b for b in breaks if 0.0 < b < self.r_max)
        if not extra or set(extra) <= set(self.breaks):
            return self
        return QuadratureGrid(self.r_max, self.n_radial, self.n_angular,
                              tuple(self.breaks) + extra)

    def refined(self, factor=2):
        return QuadratureGrid(self.r_max, factor * self.n_radial,
                              factor * self.n_angular, self.breaks)

    def describe(self):
        b = ";".join(f"{x:g}" for x in self.breaks)
        return f"polar(r_max={self.r_max:g},n_r={self.n_radial},n_theta={self.n_angular},breaks=[{b}])"


@dataclass(frozen=True)
class DiskRule:
    """Polar Gauss-Legendre rule on the unit disk; weights sum to pi."""

    n_radial: int = 24
    n_angular: int = 48
    offsets: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        r, w = _gauss_legendre(self.n_radial, 0.0, 1.0)
        theta = 2.0 * np.pi * (np.arange(self.n_angular) + 0.5) / self.n_angular
        off = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
        wt = np.repeat(w * r * (2.0 * np.pi / self.n_angular), self.n_angular)
        object.__setattr__(self, "offsets", off)
        object.__setattr__(self, "weights", wt)

    def nodes(self, z, radius):
        """Nodes for D(z, radius), shape z.shape + (m,), and matching weights."""
        z = np.asarray(z, dtype=complex)
        radius = np.broadcast_to(np.asarray(radius, dtype=float), z.shape)
        pts = z[..., None] + radius[..., None] * self.offsets
        wts = (radius ** 2)[..., None] * self.weights
        return pts, wts

    def mean(self, func, z, radius):
        """Area mean of a scalar-valued ``func`` over D(z, radius)."""
        pts, _ = self.nodes(z, radius)
        return func(pts) @ self.weights / np.pi


DEFAULT_DISK_RULE = DiskRule()
