import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from dgheart import catalog
from dgheart.field import GF, QQ

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def F7():
    return GF(7)


@pytest.fixture(scope="session")
def D2(F7):
    return catalog.truncated_polynomial(F7, 2)


@pytest.fixture(scope="session")
def D2Q():
    return catalog.truncated_polynomial(QQ, 2)


@pytest.fixture(scope="session")
def kX(F7):
    return catalog.polynomial_ring(F7, 1)


@pytest.fixture(scope="session")
def kXY(F7):
    return catalog.polynomial_ring(F7, 2)


@pytest.fixture(scope="session")
def SS(F7):
    return catalog.semisimple(F7)


@pytest.fixture(scope="session")
def RAD2(F7):
    return catalog.single_arrow(F7)


@pytest.fixture(scope="session")
def LOOP(F7):
    return catalog.two_cycle(F7)


@pytest.fixture(scope="session")
def TQ():
    return catalog.free_dg_algebra(QQ)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
