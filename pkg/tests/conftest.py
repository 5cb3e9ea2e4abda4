import os

import pytest
from hypothesis import HealthCheck, settings

from linked_grass.scalar import FieldDesc

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def fp():
    return FieldDesc.fp(10007)


@pytest.fixture
def f7():
    return FieldDesc.fp(7)


@pytest.fixture
def qq():
    return FieldDesc.rationals()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, 10):
        terminalreporter.write_line(mod.RESULTS.get(number, f"criterion {number}: FAIL (did not run to completion)"))
