import numpy as np
import pytest
from scipy import integrate
from scipy.special import gammainc, gammaln

from fockop import symbols as sy
from fockop import toeplitz as tp
from fockop.errors import NotHermitianError, ParameterError
from fockop.kernel import build_kernel_model


def test_identity_symbol(gauss_model):
    T = tp.assemble_toeplitz(gauss_model, sy.gallery("identity", 2))
    assert np.max(np.abs(T.matrix - np.eye(128))) < 1e-8
    rep = tp.spectral_report(T)
    assert rep.operator_norm == pytest.approx(1.0)
    assert np.allclose(rep.singular_values, 1.0)
    assert tp.carleson_norm(gauss_model, sy.gallery("identity", 1)) == pytest.approx(1.0)


def test_gaussian_symbol_diagonal(gauss_model):
    T = tp.assemble_toeplitz(gauss_model, sy.gallery("scalar:gauss", 1))
    k = np.arange(41)
    assert np.max(np.abs(np.diag(T.matrix)[:41] - 2.0 ** -(k + 1))) < 1e-8
    assert np.max(np.abs(T.matrix - np.diag(np.diag(T.matrix)))) < 1e-8
    rep = tp.spectral_report(T, (1.0,))
    assert rep.schatten[1.0] == pytest.approx(1 - 2.0 ** -64, abs=1e-10)
    assert rep.tail_index == 19
    assert rep.quasi_norm == {1.0: False}


def test_block_doubling(gauss_model):
    T = tp.assemble_toeplitz(gauss_model, sy.gallery("scalar:gauss", 2))
    assert tp.spectral_report(T, (1.0,)).schatten[1.0] == pytest.approx(2.0, abs=1e-10)
    assert T.entry(3, 1, 3, 1) == pytest.approx(2.0 ** -4)
    assert T.blocks.shape == (2, 2, 64, 64)
    assert np.allclose(T.blocks[0, 1], 0)


def test_chi_disk_incomplete_gamma(gauss_model):
    T = tp.assemble_toeplitz(gauss_model, sy.gallery("scalar:chi_disk", 1, R=1.0))
    k = np.arange(64)
    assert np.max(np.abs(np.diag(T.matrix).real - gammainc(k + 1, 1.0))) < 1e-6
    assert T.matrix[0, 0].real == pytest.approx(1 - np.exp(-1), abs=1e-10)


def test_poly_decay_radial_oracle(gauss_model):
    T = tp.assemble_toeplitz(gauss_model, sy.gallery("scalar:poly_decay", 1, s=3.0))
    for k in range(0, 30, 3):
        # int (1 + r^2)^{-3} r^{2k} e^{-2r^2 / 2} 2 pi r dr / (pi k!)
        val, _ = integrate.quad(lambda r: 2 * r ** (2 * k + 1) * np.exp(-r * r - gammaln(k + 1))
                                / (1 + r * r) ** 3, 0, np.inf, limit=200)
        assert T.matrix[k, k].real == pytest.approx(val, abs=1e-8)
    assert np.max(np.abs(T.matrix - np.diag(np.diag(T.matrix)))) < 1e-8


def test_gallery_hermitian_psd(gauss_model):
    for G in sy.standard_gallery(2):
        T = tp.assemble_toeplitz(gauss_model, G)
        assert T.hermitian_deviation < 1e-10
        assert tp.spectral_report(T).min_eigenvalue > -1e-8


def test_non_hermitian_assembly_rejected(small_model):
    G = sy.expression_symbol([["1", "0.5"], ["0", "1"]])
    with pytest.raises(NotHermitianError):
        tp.assemble_toeplitz(small_model, G)


def test_carleson(gauss_model):
    g = sy.gallery("scalar:gauss", 1)
    assert tp.carleson_norm(gauss_model, g) == pytest.approx(0.5, rel=1e-10)
    assert tp.carleson_norm(gauss_model, g.scaled(3.7)) == pytest.approx(3.7 * 0.5, rel=1e-10)
    rep = tp.spectral_report(tp.assemble_toeplitz(gauss_model, g), carleson=0.5)
    assert rep.carleson_embedding_norm == pytest.approx(np.sqrt(0.5))


def test_linearity_and_order(gauss_model):
    gal = sy.standard_gallery(2)
    g, one = gal[1], gal[0]
    a = tp.assemble_toeplitz(gauss_model, g).matrix
    b = tp.assemble_toeplitz(gauss_model, one).matrix
    ab = tp.assemble_toeplitz(gauss_model, g + one).matrix
    assert np.max(np.abs(ab - a - b)) < 1e-10
    # pointwise order: g I <= I, diag(g, g) <= diag(2g, g), diag(g, g) <= diag(1, g)
    for lo, hi in ((g, one), (g, gal[6]), (g, gal[7])):
        diff = tp.assemble_toeplitz(gauss_model, hi).matrix - tp.assemble_toeplitz(gauss_model, lo).matrix
        assert np.linalg.eigvalsh(diff)[0] > -1e-8


def test_truncation_stability(gauss_weight):
    small = build_kernel_model(gauss_weight, 32)
    big = build_kernel_model(gauss_weight, 64)
    for G in sy.standard_gallery(2):
        a = tp.spectral_report(tp.assemble_toeplitz(small, G)).operator_norm
        b = tp.spectral_report(tp.assemble_toeplitz(big, G)).operator_norm
        assert abs(a - b) < 1e-4


def test_schatten_one_uniform_in_basis(gauss_weight):
    # the p = 1 Berezin integral of the Gaussian symbol is finite, so the
    # truncated trace norms stay bounded as the basis grows
    for G in (sy.gallery("scalar:gauss", 1), sy.gallery("scalar:chi_disk", 1)):
        s = [tp.spectral_report(tp.assemble_toeplitz(build_kernel_model(gauss_weight, K), G),
                                (1.0,)).schatten_sums[1.0] for K in (16, 32, 64)]
        assert s[0] <= s[1] + 1e-12 <= s[2] + 2e-12
        assert s[2] <= 1.0 + 1e-8


def test_bad_exponent(gauss_model):
    T = tp.assemble_toeplitz(gauss_model, sy.gallery("identity", 1))
    with pytest.raises(ParameterError):
        tp.spectral_report(T, (0.0,))


def test_apply(gauss_model, rng):
    G = sy.gallery("diag", 2, entries=["gauss", "one"])
    T = tp.assemble_toeplitz(gauss_model, G)
    c = rng.normal(size=(64, 2))
    out = T.apply(c)
    assert np.allclose(out[:, 0], 2.0 ** -(np.arange(64) + 1) * c[:, 0], atol=1e-10)
    assert np.allclose(out[:, 1], c[:, 1], atol=1e-10)


def test_matrix_text_roundtrip(tmp_path, small_model):
    T = tp.assemble_toeplitz(small_model, sy.rotating_projector(3.0, 2))
    path = tmp_path / "m.txt"
    tp.write_matrix_text(T, path)
    back = tp.read_matrix_text(path)
    assert back.basis_size == 32 and back.d == 2
    assert np.max(np.abs(back.matrix - T.matrix)) < 1e-14


def test_spectral_csv(tmp_path, small_model):
    T = tp.assemble_toeplitz(small_model, sy.gallery("scalar:gauss", 1))
    path = tmp_path / "s.csv"
    tp.write_spectral_csv(tp.spectral_report(T, (0.5, 1.0)), path, "g")
    lines = path.read_text().splitlines()
    assert lines[0] == "symbol,index,sigma"
    assert lines[1].startswith("g,0,5.000000000000e-01")
    assert any(l.startswith("g,schatten_sum_p=1,") for l in lines)
