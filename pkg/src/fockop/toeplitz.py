"""Galerkin matrices of vectorial Toeplitz operators and their spectra."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import NotHermitianError, ParameterError

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class ToeplitzMatrix:
    """Matrix of T_G in the basis B_{k,m} = f_k e_m, index (k, m) -> k*d + m.

    ``matrix[(r,n), (k,m)] = <T_G B_{k,m}, B_{r,n}>
    = int <G(w) e_m, e_n> f_k(w) conj(f_r(w)) e^{-2phi(w)} dA(w)``.
    """

    matrix: np.ndarray
    basis_size: int
    d: int
    weight: str = ""
    symbol: str = ""
    quad: str = ""
    hermitian_deviation: float = 0.0

    def entry(self, k, m, r, n):
        """int <G e_m, e_n> f_k conj(f_r) e^{-2phi} dA."""
        return self.matrix[r * self.d + n, k * self.d + m]

    @property
    def blocks(self):
        """B[n, m] as K x K matrices, B[n, m][r, k] = matrix[(r,n), (k,m)]."""
        K, d = self.basis_size, self.d
        return self.matrix.reshape(K, d, K, d).transpose(1, 3, 0, 2)

    def apply(self, coeffs):
        """Coefficients of T_G f for f with (K, d) coefficients."""
        c = np.asarray(coeffs).reshape(-1)
        return (self.matrix @ c).reshape(self.basis_size, self.d)


def _galerkin(model, quad, values):
    """sum_i conj(F_ir) F_ik values_i[...] with F the weighted basis."""
    F = model.weighted_basis(quad)
    return (F.conj() * values[:, None]).T @ F


def assemble_toeplitz(model, G, quad=None, hermitian_tol=HERMITIAN_TOL):
    """Quadrature assembly of the Galerkin matrix of T_G.

    Raises NotHermitianError when the assembled matrix deviates from its
    adjoint by more than ``hermitian_tol`` (signals an inadequate grid).
    """
    quad = (model.quad if quad is None else quad).with_breaks(G.breaks)
    K, d = model.basis_size, G.d
    Gv = G(quad.nodes)
    A = np.empty((K, d, K, d), dtype=complex)
    for n in range(d):
        for m in range(d):
            v = Gv[:, n, m]
            A[:, n, :, m] = _galerkin(model, quad, v) if np.any(v) else 0.0
    A = A.reshape(K * d, K * d)
    dev = float(np.max(np.abs(A - A.conj().T)))
    if dev > hermitian_tol:
        raise NotHermitianError(f"assembled Toeplitz matrix not Hermitian (deviation {dev:.3g})", dev)
    return ToeplitzMatrix(A, K, d, model.weight.name, G.name, quad.describe(), dev)


def carleson_matrix(model, G, quad=None):
    """Scalar Galerkin form M[r, k] = int f_k conj(f_r) ||G|| e^{-2phi} dA.

    The vector form is M (x) I_d, so it has the same top eigenvalue.
    """
    quad = (model.quad if quad is None else quad).with_breaks(G.breaks)
    return _galerkin(model, quad, G.norm(quad.nodes))


def carleson_norm(model, G, quad=None):
    """||I_G||^2: the largest eigenvalue of the Carleson Galerkin form."""
    M = carleson_matrix(model, G, quad)
    return float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[-1])


@dataclass(frozen=True)
class SpectralReport:
    operator_norm: float
    singular_values: np.ndarray
    schatten: dict                 # p -> (sum sigma^p)^{1/p}
    schatten_sums: dict            # p -> sum sigma^p
    quasi_norm: dict               # p -> True when p < 1
    carleson_norm: float = float("nan")
    tail_index: int = None         # first i with sigma_i < tail_tol, None if never
    min_eigenvalue: float = 0.0

    @property
    def carleson_embedding_norm(self):
        return float(np.sqrt(self.carleson_norm))


def spectral_report(T, p_set=(0.5, 1.0, 2.0), carleson=float("nan"), tail_tol=1e-6):
    """Dense Hermitian eigendecomposition; eigenvalues are singular values for PSD T."""
    if any(p <= 0 for p in p_set):
        raise ParameterError("Schatten exponents must be positive")
    M = T.matrix if isinstance(T, ToeplitzMatrix) else np.asarray(T)
    ev = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    sigma = np.sort(np.abs(ev))[::-1]
    sums = {float(p): float(np.sum(sigma ** p)) for p in p_set}
    norms = {p: s ** (1.0 / p) for p, s in sums.items()}
    below = np.flatnonzero(sigma < tail_tol)
    tail = int(below[0]) if below.size else None
    return SpectralReport(float(sigma[0]), sigma, norms, sums,
                          {p: p < 1 for p in sums}, float(carleson), tail, float(ev[0]))


def write_matrix_text(T, path):
    """Header 'K d', then one row per matrix row as real/imag pairs."""
    with open(path, "w") as fh:
        fh.write(f"{T.basis_size} {T.d}\n")
        for row in T.matrix:
            fh.write(" ".join(f"{v.real:.15e} {v.imag:.15e}" for v in row))
            fh.write("\n")


def read_matrix_text(path):
    with open(path) as fh:
        K, d = (int(v) for v in fh.readline().split())
        data = np.loadtxt(fh, ndmin=2)
    M = data[:, 0::2] + 1j * data[:, 1::2]
    if M.shape != (K * d, K * d):
        raise ParameterError(f"{path}: matrix shape {M.shape} does not match header")
    return ToeplitzMatrix(M, K, d)


def write_spectral_csv(report, path, symbol=""):
    """Columns symbol, index, sigma; Schatten sums follow as rows with index 'p=<p>'."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["symbol", "index", "sigma"])
        for i, s in enumerate(report.singular_values):
            w.writerow([symbol, i, f"{s:.12e}"])
        for p, s in sorted(report.schatten_sums.items()):
            w.writerow([symbol, f"schatten_sum_p={p:g}", f"{s:.12e}"])
        w.writerow([symbol, "operator_norm", f"{report.operator_norm:.12e}"])
        w.writerow([symbol, "carleson_norm", f"{report.carleson_norm:.12e}"])
