import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockop import weights as wt
from fockop.errors import ParameterError, RadiusUnboundedError, WeightError
from fockop.geometry import Box

BOX = Box.square(2.0)


def test_gaussian_admissible(gauss_weight):
    rep = wt.check_admissibility(gauss_weight, BOX)
    assert rep.admissible
    assert rep.inf_sup_laplacian == pytest.approx(2.0)
    assert rep.reverse_holder_constant == pytest.approx(1.0, rel=1e-12)


def harmonic_weight():
    return wt.Weight(phi=lambda z: np.real(np.asarray(z) ** 2),
                     laplacian=lambda z: np.zeros(np.shape(z)))


def test_harmonic_weight_fails_condition_one():
    rep = wt.check_admissibility(harmonic_weight(), BOX)
    assert not rep.verdict["I"]
    assert rep.inf_sup_laplacian == 0.0


def test_harmonic_radius_unbounded():
    with pytest.raises(RadiusUnboundedError):
        wt.RadiusField(harmonic_weight()).rho(0.3 + 0.1j)


def test_quartic_reverse_holder_at_origin():
    w = wt.radial_poly(0.0, 1.0)
    # sup 16 r^2 against the disk mean 8 r^2
    for r in (0.25, 0.5, 1.0, 2.0):
        assert wt.reverse_holder_ratio(w, 0j, r) == pytest.approx(2.0, rel=1e-12)
    rep = wt.check_admissibility(w, BOX)
    assert rep.admissible
    # off-centre the ratio (t+1)^2 / (t^2 + 1/2), t = |z|/r, peaks at 3 for t = 1/2
    assert rep.reverse_holder_constant == pytest.approx(3.0, rel=1e-3)


def test_nonfinite_weight_reports_location():
    bad = wt.Weight(phi=lambda z: np.where(np.real(z) > 1.5, np.nan, 0.0),
                    laplacian=lambda z: np.ones(np.shape(z)))
    with pytest.raises(WeightError, match="z = "):
        wt.check_admissibility(bad, BOX)


@pytest.mark.parametrize("m", [0.5, 1.0, 8.0, 3.3])
def test_rho_gaussian_scaling(m):
    f = wt.RadiusField(wt.gaussian(m))
    z = np.array([0, 1 + 2j, -3.5, 0.1j])
    assert np.allclose(f.rho(z), (2 * m) ** -0.5, rtol=0, atol=1e-12)


def test_rho_quartic_origin(quartic_field):
    assert quartic_field.rho(0j) == pytest.approx(0.5, abs=1e-12)


def test_rho_scalar_and_memo(gauss_field):
    a = gauss_field(0.3)
    assert isinstance(a, float)
    assert gauss_field.rho(np.array([[0.3, 0.3]])).shape == (1, 2)


def test_rho_distance(gauss_field, quartic_field):
    assert wt.rho_distance(gauss_field, 0, 1) == pytest.approx(np.sqrt(2), rel=1e-12)
    assert wt.rho_distance(gauss_field, 1 + 1j, 1 + 1j) == 0.0
    assert wt.rho_distance(quartic_field, 0, 0.5) == pytest.approx(1.0, rel=1e-10)
    assert wt.rho_distance(gauss_field, 0, 1, refine=True) == pytest.approx(np.sqrt(2), rel=1e-12)


def test_doubling_measure(gauss_field, quartic_field):
    assert wt.doubling_measure(gauss_field, 2 - 1j, 1.0) == pytest.approx(2.0)
    assert wt.doubling_measure(gauss_field, 0.7j, gauss_field(0.7j)) == pytest.approx(1.0, rel=1e-12)
    assert wt.doubling_measure(quartic_field, 0, 1.0) == pytest.approx(16.0)
    with pytest.raises(ParameterError):
        wt.doubling_measure(gauss_field, 0, 0.0)


def test_normalisation_on_grid(quartic_field):
    g = BOX.grid(21)
    mu = np.array([wt.doubling_measure(quartic_field, z, quartic_field(z)) for z in g])
    assert np.all(np.abs(mu - 1) < 5e-2)


def test_fd_laplacian_agrees():
    for w in (wt.gaussian(1.0), wt.radial_poly(0.3, 1.0)):
        g = BOX.grid(15)
        assert np.allclose(wt.fd_laplacian(w, g, 1e-3), w.laplacian(g), rtol=1e-4, atol=1e-6)


def test_rho_lipschitz_and_comparability(quartic_field, rng):
    z = rng.uniform(-2, 2, 1000) + 1j * rng.uniform(-2, 2, 1000)
    w = rng.uniform(-2, 2, 1000) + 1j * rng.uniform(-2, 2, 1000)
    assert np.all(np.abs(quartic_field(z) - quartic_field(w)) <= np.abs(z - w) + 1e-6)
    for r in (0.1, 0.3, 0.5):
        c = z[:50]
        rc = quartic_field(c)
        rad = r * rc[:, None] * np.sqrt(rng.random((50, 100)))
        pts = c[:, None] + rad * np.exp(2j * np.pi * rng.random((50, 100)))
        rp = quartic_field(pts)
        tol = 1e-3 * rc[:, None]
        assert np.all(rp >= (1 - r) * rc[:, None] - tol)
        assert np.all(rp <= (1 + r) * rc[:, None] + tol)


def test_custom_weight_matches_sampled_sup(tmp_path):
    xs = np.linspace(-3, 3, 61)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    path = tmp_path / "w.csv"
    with open(path, "w") as fh:
        fh.write("x,y,phi\n")
        for x, y in zip(X.ravel(), Y.ravel()):
            fh.write(f"{x},{y},{0.5 * (x * x + y * y)}\n")
    w = wt.from_id(f"custom:{path}")
    assert not w.is_radial
    f = wt.RadiusField(w)
    # the spline reproduces a quadratic exactly
    assert np.allclose(f.rho(np.array([0, 0.5 + 0.5j])), 2 ** -0.5, atol=1e-6)
    assert np.isnan(w.phi(5.0 + 0j))


def test_custom_weight_rejects_ragged(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,y,phi\n0,0,1\n1,0,1\n")
    with pytest.raises(WeightError):
        wt.from_csv(p)


@pytest.mark.parametrize("bad", ["gaussian:-1", "radial-poly:1", "blob", "radial-poly:0,0"])
def test_bad_weight_ids(bad):
    with pytest.raises(ParameterError):
        wt.from_id(bad)


@settings(max_examples=40, deadline=None)
@given(a2=st.floats(0.05, 2.0), a4=st.floats(0.0, 2.0),
       x=st.floats(-2, 2), y=st.floats(-2, 2))
def test_rho_defining_equation(a2, a4, x, y):
    w = wt.radial_poly(a2, a4)
    f = wt.RadiusField(w)
    z = complex(x, y)
    r = f(z)
    # rho is where r^2 sup_{D(z,r)} Laplacian crosses 1
    assert r * r * w.laplacian_sup(np.asarray(z), r) == pytest.approx(1.0, rel=1e-9)
