import numpy as np
import pytest

from fockop import weights as wt
from fockop.geometry import Box
from fockop.kernel import build_kernel_model
from fockop.lattice import build_lattice


@pytest.fixture(scope="session")
def gauss_weight():
    return wt.gaussian(1.0)


@pytest.fixture(scope="session")
def gauss_field(gauss_weight):
    return wt.RadiusField(gauss_weight)


@pytest.fixture(scope="session")
def quartic_field():
    return wt.RadiusField(wt.radial_poly(0.0, 1.0))


@pytest.fixture(scope="session")
def gauss_model(gauss_weight):
    return build_kernel_model(gauss_weight, 64)


@pytest.fixture(scope="session")
def small_model(gauss_weight):
    return build_kernel_model(gauss_weight, 32, n_radial=120, n_angular=96)


@pytest.fixture(scope="session")
def gauss_lattice(gauss_field):
    return build_lattice(gauss_field, Box.square(3.0), 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
