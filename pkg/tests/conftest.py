import math

import pytest
from hypothesis import HealthCheck, settings

from cesaro import weights as wm

settings.register_profile("ci", deadline=None, derandomize=True, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


def rel(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.fixture
def exp_minus():
    return wm.analytic(1, 0, 0, -1)


@pytest.fixture
def exp_plus():
    return wm.analytic(1, 0, 0, 1)


@pytest.fixture
def chi01():
    return wm.indicator(0, 1)


E = math.e
