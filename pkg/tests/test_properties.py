"""Property tests for invariants that hold for every input."""

import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from cesaro import weights as wm
from cesaro.embedding import TAGS, Parameters, classify_regime, regime_predicates
from cesaro.hardy import HardyParams, hardy_constant, reverse_hardy_constant
from cesaro.oracle import StepFunction, ratio
from cesaro.problems import fixture

fracs = st.fractions(min_value=Fr(-3), max_value=Fr(3), max_denominator=12)
pos = st.floats(1e-3, 1e3)


@st.composite
def analytic_weights(draw, decaying=True):
    c = draw(st.floats(0.1, 10.0))
    alpha = draw(st.fractions(min_value=Fr(-1, 2), max_value=Fr(2), max_denominator=8))
    beta = draw(st.fractions(min_value=Fr(-4), max_value=Fr(0), max_denominator=8))
    gamma = draw(st.fractions(min_value=Fr(-2), max_value=Fr(0), max_denominator=8))
    if decaying:
        assume(gamma < 0 or alpha + beta < -1)
    return wm.analytic(c, alpha, beta, gamma)


@given(analytic_weights(), pos, pos, pos)
def test_integral_additivity(w, a, b, c):
    a, b, c = sorted((a, b, c))
    assume(b - a > 1e-9 * b and c - b > 1e-9 * c)
    whole = w.integrate(a, c)
    parts = w.integrate(a, b) + w.integrate(b, c)
    assert parts == pytest.approx(whole, rel=1e-9)


@given(analytic_weights(), pos)
def test_tail_splits_integral(w, t):
    assert w.integrate(0.0, math.inf) == pytest.approx(w.integrate(0.0, t) + w.tail(t), rel=1e-9)


@given(analytic_weights(), pos, pos)
def test_tail_monotone(w, s, t):
    s, t = sorted((s, t))
    assert w.tail(t) <= w.tail(s) * (1 + 1e-12)


@given(analytic_weights(decaying=False), fracs.filter(lambda s: s != 0), st.floats(0.01, 100.0))
def test_power_round_trip(w, s, t):
    back = w.power(s).power(1 / s)
    seg, ref = back.segments[0], w.segments[0]
    assert (seg.alpha, seg.beta, seg.gamma) == (ref.alpha, ref.beta, ref.gamma)
    assert back(t) == pytest.approx(w(t), rel=1e-12)


@given(analytic_weights(decaying=False), pos, pos, pos)
def test_ess_sup_monotone_in_interval(w, a, b, c):
    a, b, c = sorted((a, b, c))
    assume(a < b < c)
    assert w.ess_sup(a, b) <= w.ess_sup(a, c) * (1 + 1e-12)
    assert w.ess_sup(b, c) <= w.ess_sup(a, c) * (1 + 1e-12)


@given(analytic_weights(decaying=False), fracs.filter(lambda s: s > 0))
def test_tilde_involution(w, q):
    back = wm.tilde(wm.tilde(w, q), q)
    for a, b in zip(back.segments, w.segments):
        assert (a.alpha, a.beta, a.gamma, a.delta) == (b.alpha, b.beta, b.gamma, b.delta)
    for t in (0.1, 1.0, 10.0):
        assert back(t) == pytest.approx(w(t), rel=1e-12)


positive = st.fractions(min_value=Fr(1, 12), max_value=Fr(4), max_denominator=12)


@given(positive, positive, positive)
def test_regime_partition_exact(p, q, th):
    P = Parameters(p, q, th)
    fired = [k for k, v in regime_predicates(P).items() if v]
    assert len(fired) == 1
    assert classify_regime(P).tag in TAGS


@given(st.floats(1e-3, 3.999), st.floats(1e-3, 3.999), st.floats(1e-3, 3.999))
def test_regime_partition_float(p, q, th):
    assert sum(regime_predicates(Parameters(p, q, th)).values()) == 1


@given(st.lists(st.floats(0.0, 5.0), min_size=2, max_size=6), st.floats(1e-3, 1e3))
@settings(max_examples=25)
def test_ratio_homogeneous(heights, lam):
    assume(any(h > 0 for h in heights))
    b = np.geomspace(0.05, 20.0, len(heights) + 1)
    f = StepFunction(b, heights)
    pr = fixture("T3a")
    base = ratio(f, pr)
    assert ratio(f.scaled(lam), pr) == pytest.approx(base, rel=1e-10)


@given(st.sampled_from([1e-2, 0.3, 10.0]))
@settings(max_examples=3)
def test_hardy_scaling_law(lam):
    v, w = wm.analytic(1, 0, 0, 1), wm.indicator(0, 1)
    base = hardy_constant(HardyParams(2, 3), v, w).value
    assert hardy_constant(HardyParams(2, 3), v.scale(lam), w).value == pytest.approx(base * lam ** -0.5, rel=1e-6)
    assert hardy_constant(HardyParams(2, 3), v, w.scale(lam)).value == pytest.approx(base * lam ** (1 / 3), rel=1e-6)


@given(st.sampled_from([1e-2, 0.3, 10.0]))
@settings(max_examples=3)
def test_reverse_scaling_law(lam):
    v, w = wm.analytic(1, 0, 0, -1), wm.analytic(1, 0, -3)
    base = reverse_hardy_constant(0.5, 2, v, w).value
    assert reverse_hardy_constant(0.5, 2, v.scale(lam), w).value == pytest.approx(base * lam ** 2, rel=1e-6)
    assert reverse_hardy_constant(0.5, 2, v, w.scale(lam)).value == pytest.approx(base * lam ** -0.5, rel=1e-6)
