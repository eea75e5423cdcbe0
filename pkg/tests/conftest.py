import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stationary.weierstrass import catalog

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def entry(name, **params):
    return catalog(name, **params)


@pytest.fixture(scope="session")
def meeks():
    return entry("meeks")


@pytest.fixture(scope="session")
def eps01():
    return entry("epsilon_family", eps=0.1)


@pytest.fixture(scope="session")
def eps001():
    return entry("epsilon_family", eps=0.01)


@pytest.fixture(scope="session")
def section4():
    return entry("section4_candidate")


@pytest.fixture(scope="session")
def m2():
    return entry("rejected_m2")


@pytest.fixture(scope="session")
def essential2():
    return entry("essential", p=2)


RATIONAL_ENTRIES = [
    ("meeks", {}),
    ("meeks", {"m": 2}),
    ("meeks", {"lam": complex(np.exp(0.7j)), "m": 1}),
    ("epsilon_family", {"eps": 0.1}),
    ("epsilon_family", {"eps": 0.01}),
    ("section4_candidate", {}),
]


@pytest.fixture(scope="session", params=RATIONAL_ENTRIES, ids=lambda e: e[0] + str(e[1]))
def rational_entry(request):
    name, params = request.param
    return entry(name, **params)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
