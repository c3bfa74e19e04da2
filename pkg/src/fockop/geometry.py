"""Rectangles in the complex plane and fixed sampling stencils on disks."""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ParameterError(f"empty box {self}")

    @classmethod
    def square(cls, half_width, center=0j):
        c = complex(center)
        return cls(c.real - half_width, c.real + half_width,
                   c.imag - half_width, c.imag + half_width)

    @classmethod
    def parse(cls, text):
        parts = [float(p) for p in str(text).replace(" ", "").split(",") if p]
        if len(parts) != 4:
            raise ParameterError(f"box needs 4 numbers xmin,xmax,ymin,ymax: {text!r}")
        return cls(*parts)

    @property
    def center(self):
        return complex(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    @property
    def width(self):
        return self.xmax - self.xmin

    @property
    def height(self):
        return self.ymax - self.ymin

    @property
    def area(self):
        return self.width * self.height

    def grown(self, amount):
        return Box(self.xmin - amount, self.xmax + amount,
                   self.ymin - amount, self.ymax + amount)

    def grid(self, nx, ny=None):
        """Row-major (y outer, x inner) vertex grid, returned flat."""
        ny = nx if ny is None else ny
        x = np.linspace(self.xmin, self.xmax, nx)
        y = np.linspace(self.ymin, self.ymax, ny)
        X, Y = np.meshgrid(x, y)
        return (X + 1j * Y).ravel()

    def cell_grid(self, nx, ny=None):
        """Cell-centred grid and the common cell area (midpoint rule)."""
        ny = nx if ny is None else ny
        hx = self.width / nx
        hy = self.height / ny
        x = self.xmin + hx * (np.arange(nx) + 0.5)
        y = self.ymin + hy * (np.arange(ny) + 0.5)
        X, Y = np.meshgrid(x, y)
        return (X + 1j * Y).ravel(), hx * hy

    def contains(self, z):
        z = np.asarray(z)
        return ((z.real >= self.xmin) & (z.real <= self.xmax)
                & (z.imag >= self.ymin) & (z.imag <= self.ymax))

    def as_text(self):
        return f"{self.xmin:g},{self.xmax:g},{self.ymin:g},{self.ymax:g}"


def sup_stencil(n_angles=32, n_radii=16):
    """Unit-disk offsets used to estimate suprema: centre plus a polar grid.

    The outer ring sits on the boundary circle, so radially increasing
    functions are sampled at their true maximum distance.
    """
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    radii = np.arange(1, n_radii + 1) / n_radii
    pts = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
    return np.concatenate([[0j], pts])


_SUP_STENCIL = sup_stencil()


def disk_sup(func, z, r, stencil=None):
    """Sampled sup of ``func`` over D(z, r); vectorized over matching z, r."""
    u = _SUP_STENCIL if stencil is None else stencil
    z = np.asarray(z, dtype=complex)
    r = np.broadcast_to(np.asarray(r, dtype=float), z.shape)
    pts = z[..., None] + r[..., None] * u
    return np.max(func(pts), axis=-1)
