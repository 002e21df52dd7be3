from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from gadgets import four_star_traces, two_branch_traces

settings.register_profile(
    "repo", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def two_branch():
    return two_branch_traces(3)


@pytest.fixture
def four_star():
    return four_star_traces(3)


@pytest.fixture
def one():
    return Fraction(1)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
