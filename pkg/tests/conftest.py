import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from truncvar import make_path

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def zigzag():
    """Values [0, 1, 0, 1] at integer times."""
    return make_path([0, 1, 2, 3], [0, 1, 0, 1])


@pytest.fixture
def climb():
    """Values [0, 1, 0.5, 2] at integer times."""
    return make_path([0, 1, 2, 3], [0, 1, 0.5, 2])


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in test_acceptance.VERDICTS:
            terminalreporter.write_line(line)
