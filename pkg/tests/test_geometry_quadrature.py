import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockop.errors import ParameterError
from fockop.geometry import Box, disk_sup, sup_stencil
from fockop.quadrature import DEFAULT_DISK_RULE, DiskRule, QuadratureGrid


def test_box_basics():
    b = Box.parse("-1, 3, 0, 2")
    assert (b.width, b.height, b.area) == (4, 2, 8)
    assert b.center == 1 + 1j
    assert b.grown(1) == Box(-2, 4, -1, 3)
    assert Box.parse(b.as_text()) == b
    g = b.grid(5)
    assert g[0] == -1 + 0j and g[4] == 3 + 0j and g[-1] == 3 + 2j
    pts, cell = b.cell_grid(4)
    assert cell == pytest.approx(0.5) and pts.size == 16
    assert np.all(b.contains(pts))
    with pytest.raises(ParameterError):
        Box.parse("1,2,3")


def test_stencil_and_sup():
    s = sup_stencil(32, 16)
    assert s.size == 1 + 32 * 16 and s[0] == 0
    assert np.max(np.abs(s)) == pytest.approx(1.0)
    assert disk_sup(lambda w: np.abs(w) ** 2, 0.5 + 0j, 1.0) == pytest.approx(2.25)


def test_disk_rule_weights():
    rule = DiskRule(24, 48)
    assert rule.weights.sum() == pytest.approx(np.pi, rel=1e-14)
    pts, w = rule.nodes(np.array([1 + 1j]), np.array([0.3]))
    assert w.sum() == pytest.approx(np.pi * 0.09, rel=1e-14)
    assert np.max(np.abs(pts - (1 + 1j))) <= 0.3


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 2.0))
def test_disk_rule_polynomial_mean(x, y, a):
    # mean of |w|^2 over D(z, a) is |z|^2 + a^2 / 2
    z = complex(x, y)
    m = DEFAULT_DISK_RULE.mean(lambda w: np.abs(w) ** 2, np.array([z]), np.array([a]))[0]
    assert m == pytest.approx(abs(z) ** 2 + a * a / 2, rel=1e-12, abs=1e-12)


def test_grid_gaussian_integral():
    q = QuadratureGrid(12.0, 120, 16)
    assert np.sum(q.weights * np.exp(-np.abs(q.nodes) ** 2)) == pytest.approx(np.pi, rel=1e-13)


def test_breaks_integrate_indicator_exactly():
    smooth = QuadratureGrid(6.0, 60, 16)
    split = smooth.with_breaks((1.0,))
    f = lambda w: (np.abs(w) < 1).astype(float) * np.exp(-np.abs(w) ** 2)
    exact = np.pi * (1 - np.exp(-1))
    assert abs(np.sum(split.weights * f(split.nodes)) - exact) < 1e-13
    assert abs(np.sum(smooth.weights * f(smooth.nodes)) - exact) > 1e-6
    assert split.breaks == (1.0,) and len(split) == 2 * len(smooth)
    assert split.with_breaks((1.0,)) is split
    assert split.describe() == "polar(r_max=6,n_r=60,n_theta=16,breaks=[1])"


def test_refined():
    q = QuadratureGrid(5.0, 50, 32).refined()
    assert (q.n_radial, q.n_angular) == (100, 64)
    with pytest.raises(ParameterError):
        QuadratureGrid(0.0)
