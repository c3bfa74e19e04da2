import numpy as np
import pytest

from fockop import equivalence as eq
from fockop import symbols as sy
from fockop.errors import ParameterError
from fockop.geometry import Box


@pytest.fixture(scope="module")
def small():
    return eq.Setup(box=Box.square(2.0), basis_size=32, n_radial=100, n_angular=64,
                    grid_resolution=21, probe_resolution=101, d=2)


@pytest.fixture(scope="module")
def small1(small):
    return eq.Setup(box=Box.square(2.0), basis_size=32, n_radial=100, n_angular=64,
                    grid_resolution=21, probe_resolution=101, d=1,
                    radius_field=small.radius_field)


def test_setup_defaults(small):
    assert small.K >= 32 and small.K % 8 == 0
    assert small.lattice.covering_violations() == 0
    assert small.model.guard_radius() >= 2 * np.sqrt(2)


def test_basis_grows_to_cover_box():
    s = eq.Setup(box=Box.square(4.0), basis_size=16, n_radial=64, n_angular=32,
                 probe_resolution=61)
    assert s.model.reliable_radius() >= 4 * np.sqrt(2)


def test_refined_axes(small):
    q = small.refined("quadrature")
    assert (q.n_radial, q.n_angular, q.grid_resolution) == (200, 128, 41)
    assert small.refined("lattice").delta == pytest.approx(small.delta / 2)
    assert small.refined("box").box == Box.square(3.0)
    with pytest.raises(ParameterError):
        small.refined("weight")
    with pytest.raises(ParameterError):
        eq.Setup(delta=1.0)


def test_identity_all_ones(small):
    rep = eq.boundedness_report(small, [sy.gallery("identity", 2)])
    assert all(0.98 <= q <= 1.02 for q in rep.rows[0].q)
    five = eq.boundedness_report(small, [sy.gallery("identity", 2).scaled(5.0)])
    assert np.allclose(five.rows[0].q, 5.0, rtol=2e-2)


def test_gaussian_q1_q2(small1):
    row = eq.boundedness_report(small1, [sy.gallery("scalar:gauss", 1)]).rows[0]
    assert row.q[0] == pytest.approx(0.5, abs=1e-8)
    assert row.q[1] == pytest.approx(0.5, abs=1e-8)
    assert row.q[4] == pytest.approx(0.5, abs=1e-8)
    assert row.q[1] / row.q[0] == pytest.approx(1.0, abs=1e-8)


def test_homogeneity(small):
    G = sy.gallery("diag", 2, entries=["gauss", "chi_disk"])
    c = 3.3
    a = eq.bounded_quantities(small, G)
    b = eq.bounded_quantities(small, G.scaled(c))
    assert np.allclose(b, c * np.array(a), rtol=1e-8)
    pa = eq.schatten_quantities(small, G, (0.5, 1.0, 2.0))
    pb = eq.schatten_quantities(small, G.scaled(c), (0.5, 1.0, 2.0))
    for p in pa:
        for side in eq.SCHATTEN_SIDES:
            assert pb[p][side] == pytest.approx(c ** p * pa[p][side], rel=1e-8)


def test_compactness_examples(small):
    gal = [sy.gallery("identity", 2), sy.gallery("scalar:gauss", 2),
           sy.gallery("scalar:chi_disk", 2, R=1.0)]
    rep = eq.compactness_report(small, gal)
    assert [r.verdict for r in rep.rows] == ["non-compact-consistent", "compact-consistent",
                                             "compact-consistent"]
    g = rep.rows[1]
    assert g.berezin_profile[-1] == pytest.approx(0.5 * np.exp(-12.5), rel=1e-3)
    assert not rep.mixed


def test_schatten_examples(small1):
    rep = eq.schatten_report(small1, [sy.gallery("scalar:gauss", 1), sy.gallery("identity", 1)],
                             (1.0,))
    g, one = rep.rows
    assert g.base["schatten_sum"] == pytest.approx(1.0, abs=1e-6)
    assert g.verdict == "schatten-consistent"
    assert np.isfinite(g.lattice_ratio)
    assert one.base["schatten_sum"] == pytest.approx(small1.K, rel=1e-10)
    assert one.verdict == "divergent-consistent"
    with pytest.raises(ParameterError):
        eq.schatten_report(small1, [sy.gallery("identity", 1)], (0.0,))


def test_identity_integral_scales_with_area(small1):
    q = eq.schatten_quantities(small1, sy.gallery("identity", 1), (1.0,))[1.0]
    # dA / rho^2 = 2 dA for the Gaussian weight
    assert q["I2_berezin"] == pytest.approx(2 * small1.box.area, rel=1e-6)
    assert q["I3_average"] == pytest.approx(2 * small1.box.area, rel=1e-6)


def test_basis_independence_for_diagonal_symbol(small):
    G = sy.standard_gallery(2)[6]
    for p in (0.5, 1.0, 2.0):
        a = eq.s4_in_basis(small.radius_field, G, small.lattice.points, small.delta, p, "eigen")
        b = eq.s4_in_basis(small.radius_field, G, small.lattice.points, small.delta, p, "standard")
        assert a == pytest.approx(b, rel=1e-12)
    with pytest.raises(ParameterError):
        eq.s4_in_basis(small.radius_field, G, small.lattice.points, small.delta, 1.0, "other")


def test_comparison_constant_stable(small):
    fine = small.refined("quadrature")
    for G in sy.standard_gallery(2):
        a = eq.comparison_constant(small, G)
        b = eq.comparison_constant(fine, G)
        assert np.isfinite(a) and a > 0
        assert abs(b - a) <= 0.2 * a


def test_star_inequality_constant(small):
    for G in sy.standard_gallery(2)[:4]:
        c = eq.star_constant(small, G, samples=20, modes=8, seed=3)
        assert np.isfinite(c) and c > 0
        assert c == eq.star_constant(small, G, samples=20, modes=8, seed=3)


def test_thread_count_does_not_change_results(small):
    gal = sy.standard_gallery(2)
    a = eq.boundedness_report(small, gal, threads=1)
    b = eq.boundedness_report(small, gal, threads=3)
    assert [r.q for r in a.rows] == [r.q for r in b.rows]


def test_csv_writers(tmp_path, small):
    gal = sy.standard_gallery(2)[:2]
    eq.write_bounded_csv(eq.boundedness_report(small, gal), tmp_path / "b.csv")
    head = (tmp_path / "b.csv").read_text().splitlines()[0]
    assert head == "symbol,decay,norm_T,sup_berezin,sup_average,sup_lattice_average,carleson,max_ratio"
    rep = eq.schatten_report(small, gal, (1.0,))
    eq.write_schatten_csv(rep, tmp_path / "s.csv")
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 3
    assert "identity" in eq.summary_table(eq.boundedness_report(small, gal))
