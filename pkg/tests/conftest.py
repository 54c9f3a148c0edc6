from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from sharedproc.core import Instance

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def d1():
    return Instance.create([(1, 4, 3), (2, 8, 2)], [1])


@pytest.fixture
def two_machine():
    return Instance.create([(1, 9, 9), (2, 9, 7), (3, 5, 5)], [4, 5])


@pytest.fixture
def single():
    return Instance.create([("a", 12, 2)], [1])


def F(x):
    return Fraction(x)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS.values():
            terminalreporter.write_line(line)
