import math

import numpy as np
import pytest
from scipy.integrate import quad

from cesaro import weights as wm
from cesaro.embedding import Parameters, ReducedProblem
from cesaro.errors import AdmissibilityError, UnsupportedRegimeError
from cesaro.oracle import (MIN_BUDGET, StepFunction, best_constant_lower_bound, ces_norm,
                           ces_norm_riemann, ratio, triviality_probe)
from cesaro.problems import fixture, triviality_fixture

U3 = wm.analytic(2, 0, -3)            # 2 (1+t)^-3
T1A_RATIO = 0.4972769232742623        # chi_(0,1) on the T1a fixture, confirmed by scipy quad below


def test_step_function_validation():
    with pytest.raises(ValueError):
        StepFunction([1.0, 0.5], [1.0])
    with pytest.raises(ValueError):
        StepFunction([0.0, 1.0], [-1.0])
    with pytest.raises(ValueError):
        StepFunction([0.0, 1.0, 2.0], [1.0])
    f = StepFunction.indicator(1.0, 2.0)
    assert f(1.5) == 1.0 and f(2.5) == 0.0 and f(0.5) == 0.0


def test_ces_norm_closed_form():
    # inner min(t,1), squared: int_0^1 2t^2(1+t)^-3 + int_1^inf 2(1+t)^-3 = (2 ln 2 - 5/4) + 1/4
    f = StepFunction.indicator(0.0, 1.0)
    val = ces_norm(f, 0.5, 1.0, wm.constant(1.0), U3)
    assert val == pytest.approx(2 * math.log(2) - 1, rel=1e-9)


def test_ces_norm_zero_and_homogeneous():
    f = StepFunction([0.1, 0.5, 2.0, 7.0], [0.3, 1.2, 0.7])
    assert ces_norm(f.scaled(0.0), 0.5, 2.0, wm.constant(1.0), U3) == 0.0
    base = ces_norm(f, 0.5, 2.0, wm.constant(1.0), U3)
    for lam in (1e-3, 7.0, 1e3):
        assert ces_norm(f.scaled(lam), 0.5, 2.0, wm.constant(1.0), U3) == pytest.approx(lam * base, rel=1e-12)


@pytest.mark.parametrize("u", [U3, wm.analytic(1, 0, 0, -1), wm.analytic(1, 0, 0, 1) * wm.indicator(0, 30)])
def test_ces_norm_matches_quad(u):
    f = StepFunction([0.02, 0.3, 1.1, 25.0], [0.3, 1.2, 0.7])
    p, q = 2.0, 0.7
    b, h = f.breakpoints, f.heights

    def inner(t):
        return sum(hk ** p * max(0.0, min(t, b[k + 1]) - b[k]) for k, hk in enumerate(h))

    pts = list(b) + [30.0]
    edges = [0.0] + sorted(set(pts)) + [math.inf]
    ref = sum(quad(lambda t: inner(t) ** (q / p) * float(u(t)), lo, hi, limit=200)[0]
              for lo, hi in zip(edges[:-1], edges[1:]) if hi > b[0]) ** (1 / q)
    assert ces_norm(f, p, q, wm.constant(1.0), u) == pytest.approx(ref, rel=1e-7)
    assert ces_norm_riemann(f, p, q, wm.constant(1.0), u) == pytest.approx(ref, rel=1e-4)


def test_ratio_regression_t1a():
    pr = fixture("T1a")
    f = StepFunction.indicator(0.0, 1.0)
    # theta = 1/2: RHS integrates min(t,1)^(1/2) against w = (1/2)(1+t)^-3/2
    rhs = quad(lambda t: math.sqrt(min(t, 1.0)) * 0.5 * (1 + t) ** -1.5, 0, 1)[0] + quad(lambda t: 0.5 * (1 + t) ** -1.5, 1, math.inf)[0]
    lhs = quad(lambda t: min(t, 1.0) ** 2 * 2 * (1 + t) ** -3, 0, 1)[0] + quad(lambda t: 2 * (1 + t) ** -3, 1, math.inf)[0]
    ref = lhs / rhs ** 2
    assert ref == pytest.approx(T1A_RATIO, rel=1e-9)
    assert ratio(f, pr) == pytest.approx(T1A_RATIO, rel=1e-9)


def test_ratio_conventions():
    pr = fixture("T1a")
    assert ratio(StepFunction.indicator(0.0, 1.0).scaled(0.0), pr) == 0.0
    f = StepFunction([0.2, 1.0, 3.0], [1.0, 0.25])
    base = ratio(f, pr)
    for lam in (1e-3, 1e3):
        assert ratio(f.scaled(lam), pr) == pytest.approx(base, rel=1e-10)


def test_lower_bound_t1a():
    pr = fixture("T1a")
    res = best_constant_lower_bound(pr, budget=1000)
    value, witness = res
    assert 0.25 / 32 <= value <= 32 * 0.25
    assert ratio(witness, pr) == pytest.approx(value, rel=1e-9)


def test_lower_bound_budget_monotone():
    pr = fixture("T3a")
    vals = [best_constant_lower_bound(pr, budget=b).value for b in (500, 1000, 2000)]
    assert vals[0] <= vals[1] <= vals[2]


def test_lower_bound_deterministic():
    pr = fixture("T2")
    a = best_constant_lower_bound(pr, budget=600, seed=3)
    b = best_constant_lower_bound(pr, budget=600, seed=3)
    assert a.value == b.value and np.array_equal(a.witness.heights, b.witness.heights)


def test_lower_bound_budget_guard():
    with pytest.raises(ValueError):
        best_constant_lower_bound(fixture("T1a"), budget=MIN_BUDGET - 1)


def test_lower_bound_zero_u():
    pr = fixture("T1a").with_weights(u=wm.zero())
    assert best_constant_lower_bound(pr, budget=MIN_BUDGET).value == 0.0


def test_triviality_probe_grows():
    rows = triviality_probe(triviality_fixture(), (1e-1, 1e-2, 1e-3))
    r = [x for _, x in rows]
    assert r[0] < r[1] < r[2]


@pytest.mark.xfail(strict=True, reason="spike ratios grow like width^(-1/2) at p = 2: about 9.8x over "
                                       "two decades of width, below the factor 10 asked for")
def test_triviality_probe_factor_ten():
    rows = triviality_probe(triviality_fixture(), (1e-1, 1e-2, 1e-3))
    assert rows[-1][1] / rows[0][1] >= 10


def test_triviality_probe_rate():
    # ratio ~ width^{1/p - 1} for smooth v
    rows = triviality_probe(triviality_fixture(), (1e-3, 1e-4))
    slope = math.log(rows[1][1] / rows[0][1]) / math.log(10.0)
    assert slope == pytest.approx(0.5, abs=0.02)


def test_triviality_probe_guards():
    pr = fixture("T1a")
    with pytest.raises(UnsupportedRegimeError):
        triviality_probe(pr)
    bad = ReducedProblem(Parameters(2, 2, 1), wm.constant(1.0), wm.constant(1.0), wm.analytic(1, 0, 0, -1))
    with pytest.raises(AdmissibilityError):
        triviality_probe(bad)
    assert len(triviality_probe(triviality_fixture(), (1.0,))) == 1
