import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from weightlab.space import make_cyclic_space, make_dyadic_space

settings.register_profile(
    "weightlab", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("weightlab")


@pytest.fixture(scope="session")
def dyadic3():
    return make_dyadic_space(3)


@pytest.fixture(scope="session")
def dyadic4():
    return make_dyadic_space(4)


@pytest.fixture(scope="session")
def cyclic16():
    return make_cyclic_space(16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def two_point_space():
    """Unit masses on two points with basis {0}, {1}, {0, 1}."""
    from weightlab.space import MeasureSpace, SetBasis

    space = MeasureSpace(np.ones(2), label="two-point")
    return space, SetBasis(space, (np.array([0]), np.array([1]), np.array([0, 1])))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
