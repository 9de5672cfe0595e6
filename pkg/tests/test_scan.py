import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cesaro.extended import exp_of, lsub, llse, to_json_value, from_json_value
from cesaro.scan import golden, maximize_log_scan, maximize_scan


def test_scan_t_exp():
    x, val = maximize_scan(lambda t: t * np.exp(-t))
    assert x == pytest.approx(1.0, rel=1e-4)
    assert val == pytest.approx(math.exp(-1), rel=1e-10)


def test_scan_rational():
    x, val = maximize_scan(lambda t: t / (1 + t) ** 2)
    assert x == pytest.approx(1.0, rel=1e-4)
    assert val == pytest.approx(0.25, rel=1e-10)


@pytest.mark.parametrize("x0", [0.5, 3.0])
def test_scan_shifted(x0):
    x, val = maximize_scan(lambda t: (t - x0) / (1 + t) ** 2, (x0, math.inf))
    assert x == pytest.approx(1 + 2 * x0, rel=1e-4)
    assert val == pytest.approx(1 / (4 * (1 + x0)), rel=1e-10)


def test_scan_constant():
    _, val = maximize_scan(lambda t: np.full_like(t, 2.5), (1.0, 7.0))
    assert val == pytest.approx(2.5)


def test_scan_growth_is_infinite():
    res = maximize_scan(lambda t: np.sqrt(t))
    assert res.value == math.inf and res.unbounded
    # slow power growth towards zero as well
    assert maximize_scan(lambda t: t ** -0.3).value == math.inf


def test_scan_bounded_monotone_is_finite():
    res = maximize_scan(lambda t: t / (1 + t))
    assert res.value == pytest.approx(1.0, rel=1e-6)
    assert not res.unbounded


def test_scan_failures_counted():
    def g(t):
        t = np.atleast_1d(t)
        return np.where(t > 1e3, np.nan, np.exp(-t))
    res = maximize_scan(g)
    assert res.failures > 0
    assert res.value == pytest.approx(1.0, rel=1e-6)


def test_scan_invalid_interval():
    with pytest.raises(ValueError):
        maximize_scan(lambda t: t, (2.0, 1.0))


@given(st.floats(0.05, 20.0), st.floats(0.2, 3.0))
def test_scan_dominates_grid(a, k):
    # the refined value is never below the best grid value, and matches the closed form
    res = maximize_log_scan(lambda t: k * np.log(t) - a * t)
    assert res.value >= np.max(res.grid_values) - 1e-12
    exact = k * math.log(k / a) - k
    assert res.value == pytest.approx(exact, abs=1e-9)


def test_golden_parabola():
    x, v = golden(lambda z: -(z - 0.3) ** 2, -1.0, 2.0)
    assert x == pytest.approx(0.3, abs=1e-5)
    assert v == pytest.approx(0.0, abs=1e-10)


def test_extended_arithmetic():
    assert lsub(math.log(3.0), math.log(1.0)) == pytest.approx(math.log(2.0))
    assert lsub(1.0, 1.0) == -math.inf
    assert llse(np.array([-np.inf, -np.inf])) == -math.inf
    assert exp_of(1000.0) == math.inf
    assert exp_of(-math.inf) == 0.0
    for x in (0.0, 1.5, math.inf):
        assert from_json_value(to_json_value(x)) == x
