"""Berezin transforms and averaging functions, scalar and operator-valued."""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .kernel import kernel_diagonal
from .quadrature import DEFAULT_DISK_RULE

CHUNK = 256


def _symbol_quad(model, G, quad):
    quad = model.quad if quad is None else quad
    return quad.with_breaks(G.breaks)


def _berezin_density(model, quad, z):
    """|k_z(w_i)|^2 e^{-2 phi(w_i)} q_i on the nodes, shape (nodes, points)."""
    F = model.weighted_basis(quad)
    fz = model.basis(z)
    Kz = F @ fz.conj().T
    return np.abs(Kz) ** 2 / kernel_diagonal(model, z)[None, :]


def berezin_scalar(model, G, z, quad=None):
    """G~(z) = int |k_z(w)|^2 e^{-2phi(w)} ||G(w)|| dA(w), by direct quadrature."""
    quad = _symbol_quad(model, G, quad)
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    g = G.norm(quad.nodes)
    out = np.empty(flat.size)
    for s in range(0, flat.size, CHUNK):
        out[s:s + CHUNK] = g @ _berezin_density(model, quad, flat[s:s + CHUNK])
    return out.reshape(z.shape)


def membership_integral(model, G, z, quad=None):
    """int |K(w, z)|^2 e^{-2phi(w)} ||G(w)||^2 dA(w) at each probe z.

    Finite values at the probes are the checkable part of the requirement
    that T_G be defined on all kernel functions.
    """
    quad = _symbol_quad(model, G, quad)
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    g = G.norm(quad.nodes) ** 2
    out = np.empty(flat.size)
    for s in range(0, flat.size, CHUNK):
        part = flat[s:s + CHUNK]
        out[s:s + CHUNK] = (g @ _berezin_density(model, quad, part)) * kernel_diagonal(model, part)
    return out.reshape(z.shape)


def berezin_operator(model, G, z, quad=None):
    """Operator-valued Berezin transform, shape z.shape + (d, d)."""
    quad = _symbol_quad(model, G, quad)
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    Gv = G(quad.nodes).reshape(-1, G.d * G.d)
    out = np.empty((flat.size, G.d * G.d), dtype=complex)
    for s in range(0, flat.size, CHUNK):
        out[s:s + CHUNK] = _berezin_density(model, quad, flat[s:s + CHUNK]).T @ Gv
    out = out.reshape(z.shape + (G.d, G.d))
    return _symmetrize(out)


def berezin_from_blocks(model, blocks, z):
    """Berezin transform read off Galerkin blocks B[n, m] (K x K each).

    With v = conj(f(z)), G~op(z)[n, m] = v^H B[n, m] v / ||v||^2. For the
    truncated model this equals the direct quadrature exactly.
    """
    z = np.asarray(z, dtype=complex)
    v = model.basis(z.ravel()).conj()
    nrm = np.sum(np.abs(v) ** 2, axis=-1)
    d = blocks.shape[0]
    out = np.einsum("pr,nmrk,pk->pnm", v.conj(), blocks, v) / nrm[:, None, None]
    return _symmetrize(out.reshape(z.shape + (d, d)))


def _symmetrize(m):
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))


def _check_delta(delta):
    if not 0.0 < delta <= 1.0:
        raise ParameterError(f"delta must lie in (0, 1], got {delta}")


def averaging_scalar(field, G, z, delta, rule=DEFAULT_DISK_RULE):
    """Mean of ||G|| over D^delta(z) = D(z, delta rho(z)), divided by the exact area."""
    _check_delta(delta)
    z = np.asarray(z, dtype=complex)
    pts, wts = rule.nodes(z, delta * field.rho(z))
    area = np.pi * (delta * field.rho(z)) ** 2
    return np.sum(G.norm(pts) * wts, axis=-1) / area


def averaging_operator(field, G, z, delta, rule=DEFAULT_DISK_RULE):
    """Matrix mean of G over D^delta(z), shape z.shape + (d, d)."""
    _check_delta(delta)
    z = np.asarray(z, dtype=complex)
    rho = field.rho(z)
    pts, wts = rule.nodes(z, delta * rho)
    area = np.pi * (delta * rho) ** 2
    out = np.einsum("...q,...qnm->...nm", wts, G(pts)) / area[..., None, None]
    return _symmetrize(out)


@dataclass(frozen=True)
class EigenbasisField:
    points: np.ndarray
    eigenvalues: np.ndarray     # (J, d), descending
    eigenvectors: np.ndarray    # (J, d, d), columns e_m^j

    def residual(self, matrices):
        """max ||A e_m - lambda_m e_m|| over points and m."""
        Av = matrices @ self.eigenvectors
        lv = self.eigenvectors * self.eigenvalues[:, None, :]
        return float(np.max(np.abs(Av - lv), initial=0.0))


def sorted_eigh(mats):
    """Descending Hermitian eigendecomposition with a fixed phase convention.

    Each eigenvector is rotated so its first component of magnitude > 1e-12
    is real positive.
    """
    vals, vecs = np.linalg.eigh(mats)
    vals = vals[..., ::-1]
    vecs = vecs[..., ::-1]
    mag = np.abs(vecs)
    first = np.argmax(mag > 1e-12, axis=-2)
    lead = np.take_along_axis(vecs, first[..., None, :], axis=-2)
    phase = np.where(np.abs(lead) > 0, np.conj(lead) / np.maximum(np.abs(lead), 1e-300), 1.0)
    return vals, vecs * phase


def eigenbasis_at(field, G, points, delta, rule=DEFAULT_DISK_RULE):
    """Eigenbasis of the averaging operator at each point (``points`` or a Lattice)."""
    pts = getattr(points, "points", points)
    pts = np.asarray(pts, dtype=complex).ravel()
    mats = averaging_operator(field, G, pts, delta, rule)
    vals, vecs = sorted_eigh(mats)
    return EigenbasisField(pts, vals, vecs)


@dataclass(frozen=True)
class TransformReport:
    points: np.ndarray
    berezin: np.ndarray            # scalar G~
    average: np.ndarray            # scalar G^_delta
    berezin_op: np.ndarray         # (P, d, d)
    average_op: np.ndarray         # (P, d, d)
    delta: float

    @property
    def sup_berezin(self):
        return float(np.max(self.berezin))

    @property
    def sup_average(self):
        return float(np.max(self.average))

    def ring_profile(self, radii, tol=1e-9):
        """Max of G~ and G^_delta over points lying on each circle |z| = r."""
        out = []
        a = np.abs(self.points)
        for r in radii:
            sel = np.abs(a - r) < tol
            out.append((float(r), float(self.berezin[sel].max()), float(self.average[sel].max())))
        return out


def transform_report(model, field, G, points, delta, quad=None):
    pts = np.asarray(points, dtype=complex).ravel()
    return TransformReport(
        pts,
        berezin_scalar(model, G, pts, quad),
        averaging_scalar(field, G, pts, delta),
        berezin_operator(model, G, pts, quad),
        averaging_operator(field, G, pts, delta),
        float(delta))


def write_transform_csv(report, path):
    """Columns x, y, berezin, average, berezin_op_norm, average_op_trace."""
    bnorm = np.linalg.eigvalsh(report.berezin_op)[:, -1]
    atrace = np.trace(report.average_op, axis1=-2, axis2=-1).real
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "berezin", "average", "berezin_op_norm", "average_op_trace"])
        for z, b, a, bn, at in zip(report.points, report.berezin, report.average, bnorm, atrace):
            w.writerow([f"{z.real:.12e}", f"{z.imag:.12e}", f"{b:.12e}", f"{a:.12e}",
                        f"{bn:.12e}", f"{at:.12e}"])
