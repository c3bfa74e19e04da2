"""Truncated orthonormal-basis model of the scalar Fock space F^2_phi(C).

The vector-valued kernel is K(z, w) times the d x d identity and is never
materialised; vector-valued data is handled coordinatewise.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import ExtrapolationWarning, ParameterError
from .quadrature import DEFAULT_DISK_RULE, QuadratureGrid

TAIL_TOL = 1e-12
RELIABLE_TOL = 1e-10


def choose_r_max(weight, basis_size, tail=TAIL_TOL):
    """Smallest R past the peak of r^{2K+1} e^{-2 phi(r)} where it drops below ``tail``."""
    r = np.arange(0.01, 400.0, 0.01)
    lg = (2 * basis_size + 1) * np.log(r) - 2.0 * weight.radial_phi(r)
    peak = int(np.argmax(lg))
    after = np.flatnonzero((np.arange(r.size) > peak) & (lg < np.log(tail)))
    if after.size == 0:
        raise ParameterError("weight too light: cannot choose a truncation radius")
    return float(r[after[0]])


@dataclass
class KernelModel:
    """Orthonormal functions f_k = sum_j coeffs[j, k] z^j, k < basis_size.

    For radial weights coeffs is diagonal (f_k = z^k / sqrt(h_k)) and basis
    values are produced by a ratio recurrence that never forms z^k / h_k.
    """

    weight: object
    basis_size: int
    quad: QuadratureGrid
    moments: np.ndarray = None
    log_moments: np.ndarray = None
    coeffs: np.ndarray = None
    scale: float = 1.0
    conditioning: float = 1.0
    _node_cache: dict = field(default_factory=dict, repr=False)

    @property
    def r_max(self):
        return self.quad.r_max

    @property
    def is_diagonal(self):
        return self.coeffs is None

    def basis(self, z):
        """f_k(z) for all k; shape z.shape + (basis_size,)."""
        z = np.asarray(z, dtype=complex)
        K = self.basis_size
        out = np.empty(z.shape + (K,), dtype=complex)
        if self.is_diagonal:
            ratio = np.exp(0.5 * (self.log_moments[:-1] - self.log_moments[1:]))
            out[..., 0] = np.exp(-0.5 * self.log_moments[0])
            for k in range(1, K):
                out[..., k] = out[..., k - 1] * z * ratio[k - 1]
            return out
        zs = z / self.scale
        out[..., 0] = 1.0
        for k in range(1, K):
            out[..., k] = out[..., k - 1] * zs
        return out @ self.coeffs

    def weighted_basis(self, quad=None):
        """sqrt(q_i) e^{-phi(w_i)} f_k(w_i) on quadrature nodes (cached per grid)."""
        quad = self.quad if quad is None else quad
        key = (quad.r_max, quad.n_radial, quad.n_angular, quad.breaks)
        hit = self._node_cache.get(key)
        if hit is None:
            s = np.sqrt(quad.weights) * np.exp(-self.weight.phi(quad.nodes))
            hit = self.basis(quad.nodes) * s[:, None]
            self._node_cache[key] = hit
        return hit

    def gram(self, quad=None):
        F = self.weighted_basis(quad)
        return F.conj().T @ F

    def reliable_radius(self, tol=RELIABLE_TOL):
        """Largest |z| where the last basis term carries < tol of K(z, z)."""
        r = np.linspace(0.0, self.r_max, 2001)
        f = self.basis(r.astype(complex))
        p = np.abs(f) ** 2
        frac = p[:, -1] / p.sum(axis=1)
        bad = np.flatnonzero(frac >= tol)
        if bad.size == 0:
            return float(r[-1])
        return float(r[max(bad[0] - 1, 0)])

    def guard_radius(self):
        return min(0.8 * self.r_max, self.reliable_radius())


def build_kernel_model(weight, basis_size=64, quad=None, n_radial=200, n_angular=128,
                       r_max=None):
    """Moments by radial quadrature (radial weights) or QR orthonormalisation."""
    if basis_size < 1:
        raise ParameterError("basis_size must be positive")
    if quad is None:
        if r_max is None:
            if not weight.is_radial:
                raise ParameterError("non-radial weights need an explicit r_max")
            r_max = choose_r_max(weight, basis_size)
        quad = QuadratureGrid(r_max, n_radial, n_angular)
    if weight.is_radial:
        return _radial_model(weight, basis_size, quad)
    return _orthonormalised_model(weight, basis_size, quad)


def _radial_model(weight, K, quad):
    r = quad.radii
    lw = np.log(quad.radial_weights) + np.log(r) - 2.0 * weight.radial_phi(r)
    k = np.arange(K)
    with np.errstate(divide="ignore"):
        logm = np.log(2.0 * np.pi) + logsumexp(lw[None, :] + 2.0 * k[:, None] * np.log(r)[None, :], axis=1)
    finite = np.isfinite(logm)
    if not finite.all():
        K = int(np.argmin(finite))
        warnings.warn(f"moments non-finite beyond k = {K - 1}; basis reduced to {K}",
                      RuntimeWarning, stacklevel=3)
        logm = logm[:K]
    return KernelModel(weight, K, quad, moments=np.exp(logm), log_moments=logm)


def _orthonormalised_model(weight, K, quad):
    if weight.domain is not None:
        rect = weight.domain
        if quad.r_max > min(-rect.xmin, rect.xmax, -rect.ymin, rect.ymax):
            raise ParameterError("quadrature disk leaves the sampled domain of the weight")
    scale = 0.5 * quad.r_max
    model = KernelModel(weight, K, quad, coeffs=np.eye(K, dtype=complex), scale=scale)
    for _ in range(2):
        model._node_cache.clear()
        F = model.weighted_basis()
        if not np.all(np.isfinite(F)):
            raise ParameterError("weight is non-finite on the quadrature grid")
        _, R = np.linalg.qr(F)
        Rinv = np.linalg.solve(R, np.eye(K))
        model.coeffs = model.coeffs @ Rinv
        model.conditioning = max(model.conditioning, float(np.linalg.cond(R)))
    model._node_cache.clear()
    return model


def _check_range(model, *pts):
    for p in pts:
        if np.any(np.abs(p) > model.r_max):
            warnings.warn("kernel evaluated outside the truncation radius", ExtrapolationWarning,
                          stacklevel=3)
            return


def eval_kernel(model, z, w):
    """Truncated K(z, w) = sum_k f_k(z) conj(f_k(w)); broadcasts z against w."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _check_range(model, z, w)
    return np.sum(model.basis(z) * model.basis(w).conj(), axis=-1)


def kernel_diagonal(model, z):
    return np.sum(np.abs(model.basis(z)) ** 2, axis=-1)


def kernel_norm(model, z, p=2.0):
    """||K_z|| in F^p_phi: (int |K_z|^p e^{-p phi} dA)^{1/p}, or the weighted sup for p = inf."""
    z = np.asarray(z, dtype=complex)
    _check_range(model, z)
    if p == 2:
        return np.sqrt(kernel_diagonal(model, z))
    if p <= 0:
        raise ParameterError("p must be positive")
    quad = model.quad
    Kz = model.basis(quad.nodes) @ model.basis(z).conj().T            # nodes x points
    vals = np.abs(Kz) * np.exp(-model.weight.phi(quad.nodes))[:, None]
    if np.isinf(p):
        out = vals.max(axis=0)
    else:
        out = (quad.weights @ vals ** p) ** (1.0 / p)
    return out.reshape(z.shape)


def project(model, samples, quad=None):
    """Coefficients <f, f_k> of node samples; (N,) -> (K,), (N, d) -> (K, d)."""
    quad = model.quad if quad is None else quad
    F = model.weighted_basis(quad)
    s = np.sqrt(quad.weights) * np.exp(-model.weight.phi(quad.nodes))
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim == 1:
        return F.conj().T @ (samples * s)
    return F.conj().T @ (samples * s[:, None])


def reconstruct(model, coeffs, z):
    """Evaluate sum_k c_k f_k at points z (coordinatewise for (K, d) coefficients)."""
    return model.basis(z) @ np.asarray(coeffs)


@dataclass(frozen=True)
class KernelEstimateReport:
    norm_ratio: tuple            # (min, max) of ||K_z|| e^{-phi(z)} rho(z)
    local_ratio: tuple           # (min, max) of |k_z(w)|^2 e^{-2phi(w)} rho(z)^2, w in D^alpha(z)
    integral_ratio: dict         # p -> (min, max) of the kernel integral ratio, beta = 0
    epsilon: float               # fitted exponential decay rate against d_rho
    alpha: float

    def rows(self):
        out = [("norm_ratio_min", self.norm_ratio[0]), ("norm_ratio_max", self.norm_ratio[1]),
               ("local_ratio_min", self.local_ratio[0]), ("local_ratio_max", self.local_ratio[1])]
        for p, (a, b) in sorted(self.integral_ratio.items()):
            out += [(f"integral_ratio_p{p:g}_min", a), (f"integral_ratio_p{p:g}_max", b)]
        out += [("epsilon", self.epsilon), ("alpha", self.alpha)]
        return out


def verify_kernel_estimates(model, field, grid, alpha=0.5, p_values=(1.0, 2.0)):
    """Two-sided ratios behind the standard kernel estimates, evaluated on ``grid``."""
    grid = np.asarray(grid, dtype=complex).ravel()
    guard = model.guard_radius()
    if np.any(np.abs(grid) > guard):
        raise ParameterError(f"grid leaves the guard radius {guard:.3g}")
    phi = model.weight.phi
    rho = field.rho(grid)
    diag = kernel_diagonal(model, grid)
    norm_ratio = np.sqrt(diag) * np.exp(-phi(grid)) * rho

    pts, _ = DEFAULT_DISK_RULE.nodes(grid, alpha * rho)
    Kzw = np.einsum("pk,pmk->pm", model.basis(grid).conj(), model.basis(pts))
    local = np.abs(Kzw) ** 2 / diag[:, None] * np.exp(-2.0 * phi(pts)) * (rho ** 2)[:, None]

    integral = {}
    for p in p_values:
        val = kernel_norm(model, grid, p) ** p
        ratio = val / (np.exp(p * phi(grid)) * rho ** (2.0 * (1.0 - p)))
        integral[float(p)] = (float(ratio.min()), float(ratio.max()))

    # decay fit: log(|K(z,w)| e^{-phi(z)-phi(w)} rho(z) rho(w)) against |z-w|/rho(z)
    zs = grid[:: max(1, grid.size // 12)]
    ws = grid
    Z, Wp = np.meshgrid(zs, ws, indexing="ij")
    Z, Wp = Z.ravel(), Wp.ravel()
    sel = Z != Wp
    Z, Wp = Z[sel], Wp[sel]
    K = np.abs(np.sum(model.basis(Z) * model.basis(Wp).conj(), axis=-1))
    lhs = np.log(np.maximum(K, 1e-300)) - phi(Z) - phi(Wp) + np.log(field.rho(Z) * field.rho(Wp))
    dist = np.abs(Z - Wp) / field.rho(Z)
    eps = -np.polyfit(dist, lhs, 1)[0]
    return KernelEstimateReport(
        (float(norm_ratio.min()), float(norm_ratio.max())),
        (float(local.min()), float(local.max())),
        integral, float(eps), float(alpha))


def pointwise_bound_constant(model, field, coeffs, grid, delta, rule=DEFAULT_DISK_RULE):
    """Smallest C with ||f(z)||^2 e^{-2phi(z)} <= C delta^{-2} rho^{-2} int_{D^delta(z)} ||f||^2 e^{-2phi}.

    ``coeffs`` has shape (K,) for scalar or (K, d) for vector-valued f.
    """
    coeffs = np.asarray(coeffs)
    if coeffs.ndim == 1:
        coeffs = coeffs[:, None]
    grid = np.asarray(grid, dtype=complex).ravel()
    phi = model.weight.phi
    rho = field.rho(grid)
    lhs = np.sum(np.abs(model.basis(grid) @ coeffs) ** 2, axis=-1) * np.exp(-2.0 * phi(grid))
    pts, wts = rule.nodes(grid, delta * rho)
    vals = np.sum(np.abs(model.basis(pts) @ coeffs) ** 2, axis=-1) * np.exp(-2.0 * phi(pts))
    integral = np.sum(vals * wts, axis=-1)
    return float(np.max(lhs * delta ** 2 * rho ** 2 / integral))


def kernel_heatmap(model, z0, box, resolution=81):
    """Samples of |K(z0, x+iy)| e^{-phi(x+iy)} on a box grid (row-major)."""
    g = box.grid(resolution)
    vals = np.abs(eval_kernel(model, z0, g)) * np.exp(-model.weight.phi(g))
    return g, vals
