"""Building-block constants: Copson-Hardy (H), reverse Hardy (R) and
iterated Copson-type (I) functionals.

Each evaluator returns a :class:`Constant` holding the value, the case tag and
the individual terms.  Exponents follow the usual conventions: ``p' = p/(p-1)``
and ``r = pq/(p-q)`` when ``q < p``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .errors import AdmissibilityError, UnsupportedRegimeError
from .extended import INF, exp_of
from .kernels import Context, clean

CHECK_POINTS = np.geomspace(1e-8, 1e8, 64)


@dataclass(frozen=True)
class HardyParams:
    p: float
    q: float
    m: Optional[float] = None

    def __post_init__(self):
        for name in ("p", "q", "m"):
            x = getattr(self, name)
            if x is not None and not (0 < float(x) < INF):
                raise ValueError(f"{name} must be positive and finite, got {x}")

    @property
    def p_conj(self) -> float:
        p = float(self.p)
        return INF if p == 1 else p / (p - 1.0)

    @property
    def r(self) -> float:
        p, q = float(self.p), float(self.q)
        if not q < p:
            raise ValueError("r is defined only for q < p")
        return p * q / (p - q)


@dataclass
class Constant:
    value: float
    case: str
    terms: Dict[str, float] = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def _combine(case, logs):
    terms = {k: exp_of(v) for k, v in logs.items()}
    return Constant(float(sum(terms.values())), case, terms)


def _require_p_gt_1(p):
    if not p > 1:
        raise UnsupportedRegimeError(f"p = {p}: these characterizations need p > 1")


def _check_points(ctx):
    t = CHECK_POINTS
    return t[(t >= ctx.lo) & (t <= ctx.hi)]


# -- Copson-Hardy -------------------------------------------------------------

def hardy_constant(params: HardyParams, v, w) -> Constant:
    """H_1 (p <= q) or H_2 (q < p)."""
    p, q = float(params.p), float(params.q)
    _require_p_gt_1(p)
    pc = params.p_conj
    vp = v.power(1.0 - pc)
    ctx = Context([v, w, vp])
    if p <= q:
        val = ctx.sup(lambda t: clean(ctx.head(w, t) / q + ctx.tail(vp, t) / pc))
        return _combine("H1", {"H1": val})
    t = ctx.nodes.t
    f = (p / (p - q)) * ctx.head(w, t) + (p * (q - 1) / (p - q)) * ctx.tail(vp, t) + ctx.value(vp, t)
    val = (p - q) / (p * q) * ctx.integral(clean(f))
    return _combine("H2", {"H2": val})


def hardy_sup_constant(p: float, v, w) -> Constant:
    """H_3, the supremum-type Copson-Hardy constant."""
    p = float(p)
    _require_p_gt_1(p)
    pc = p / (p - 1.0)
    vp = v.power(1.0 - pc)
    ctx = Context([v, w, vp])

    def profile(t):
        return clean(_ess_sup_below(w, t) + ctx.tail(vp, t) / pc)

    return _combine("H3", {"H3": ctx.sup(profile)})


def _ess_sup_below(w, t):
    t = np.atleast_1d(t)
    return np.log(np.array([w.ess_sup(0.0, float(x)) for x in t]))


def _ess_sup_above(w, t):
    t = np.atleast_1d(t)
    return np.log(np.array([w.ess_sup(float(x), INF) for x in t]))


# -- reverse Hardy -------------------------------------------------------------

def reverse_hardy_constant(p: float, q: float, v, w) -> Constant:
    """R_1 / R_2 (q <= p) or R_3 / R_4 (p < q), for 0 < p <= 1."""
    p, q = float(p), float(q)
    if p > 1:
        raise UnsupportedRegimeError(f"p = {p}: reverse Hardy constants need p <= 1")
    if not (p > 0 and q > 0):
        raise ValueError("p and q must be positive")
    vr = v.power(1.0 / (1.0 - p)) if p < 1 else None
    ctx = Context([v, w, vr])
    grid = _check_points(ctx)
    tails = ctx.tail(w, grid)
    bad = np.nonzero(tails == np.inf)[0]
    if bad.size:
        t = float(grid[bad[0]])
        raise AdmissibilityError(f"tail of w diverges at t = {t:g}", t=t)
    if q <= p:
        if p < 1:
            val = ctx.sup(lambda t: clean(-ctx.tail(w, t) / q + (1 - p) / p * ctx.tail(vr, t)))
            return _combine("R1", {"R1": val})
        val = ctx.sup(lambda t: clean(-ctx.tail(w, t) / q + _ess_sup_above(v, t)))
        return _combine("R2", {"R2": val})
    if w.is_zero():
        raise AdmissibilityError("w vanishes identically; the p < q characterization needs w != 0")
    t = ctx.nodes.t
    lW, lw = ctx.tail(w, t), ctx.value(w, t)
    W0 = ctx.total(w)
    if p < 1:
        f = q * (1 - p) / (q - p) * ctx.tail(vr, t) - q / (q - p) * lW + lw
        a = (q - p) / (q * p) * ctx.integral(f)
        b = clean((1 - p) / p * ctx.total(vr) - W0 / q)
        return _combine("R3", {"R3a": a, "R3b": b})
    sup_v = _ess_sup_above(v, t)
    f = q / (q - 1) * sup_v - q / (q - 1) * lW + lw
    a = (q - 1) / q * ctx.integral(f)
    b = clean(math.log(v.ess_sup(0.0, INF)) - W0 / q)
    return _combine("R4", {"R4a": a, "R4b": b})


# -- iterated Copson ----------------------------------------------------------

def _positivity(ctx, values, what):
    grid = _check_points(ctx)
    vals = values(grid)
    for t, v in zip(grid, vals):
        if v == -np.inf or v == np.inf:
            raise AdmissibilityError(f"{what} is {'0' if v < 0 else 'infinite'} at t = {t:g}", t=float(t))
    if vals[0] < -200:
        warnings.warn(f"{what} degenerates towards t = 0 (log value {vals[0]:.1f})", RuntimeWarning)


def iterated_copson_constant(params: HardyParams, u, v, w) -> Constant:
    """I_1 .. I_5 according to the position of p relative to m and q."""
    p, q = float(params.p), float(params.q)
    if params.m is None:
        raise ValueError("iterated Copson constants need m")
    m = float(params.m)
    _require_p_gt_1(p)
    if u.is_zero() or w.is_zero():
        return Constant(0.0, "trivial", {})
    pc = params.p_conj
    vp = v.power(1.0 - pc)
    ctx = Context([u, v, w, vp])

    def inner(t):
        # log int_0^t w(s) (int_s^t u)^{q/m} ds
        return ctx.lower(t, lambda s, tt: ctx.value(w, s) + q / m * ctx.span_integral(u, s, tt))

    _positivity(ctx, inner, "int_0^t w(s) (int_s^t u)^{q/m} ds")

    def I1():
        return ctx.sup(lambda t: clean(inner(t) / q + ctx.tail(vp, t) / pc))

    def B(t):
        # log int_t^inf (int_t^s u)^{p/(p-m)} V(s)^{p(m-1)/(p-m)} vp(s) ds
        return ctx.upper(t, lambda x, s: p / (p - m) * ctx.span_integral(u, x, s)
                         + p * (m - 1) / (p - m) * ctx.tail(vp, s) + ctx.value(vp, s))

    def I4():
        return ctx.sup(lambda t: clean(ctx.head(w, t) / q + (p - m) / (p * m) * B(t)))

    t = ctx.nodes.t

    def I2():
        r = params.r
        S = ctx.at_nodes(lambda x: ctx.sup_upper(
            x, lambda xx, z: r / m * ctx.span_integral(u, xx, z) + r / pc * ctx.tail(vp, z)))
        f = r / p * ctx.head(w, t) + ctx.value(w, t) + S
        return ctx.integral(f) / r

    def I3():
        r = params.r
        S = ctx.at_nodes(lambda x: ctx.sup_upper(
            x, lambda xx, z: q / m * ctx.span_integral(u, xx, z) + r / pc * ctx.tail(vp, z)))
        f = S + r / p * ctx.at_nodes(inner) + ctx.value(w, t)
        return ctx.integral(f) / r

    def I5():
        r = params.r
        f = r / p * ctx.head(w, t) + ctx.value(w, t) + q * (p - m) / (m * (p - q)) * ctx.at_nodes(B)
        return ctx.integral(f) / r

    if p <= min(m, q):
        return _combine("I1", {"I1": I1()})
    if q < p <= m:
        return _combine("I2+I3", {"I2": I2(), "I3": I3()})
    if m < p <= q:
        return _combine("I1+I4", {"I1": I1(), "I4": I4()})
    return _combine("I3+I5", {"I3": I3(), "I5": I5()})


def iterated_sup_copson_constant(p: float, q: float, u, v, w) -> Constant:
    """I_6 (p <= q) or I_7 + I_8 (q < p)."""
    p, q = float(p), float(q)
    _require_p_gt_1(p)
    if u.is_zero() or w.is_zero():
        return Constant(0.0, "trivial", {})
    pc = p / (p - 1.0)
    vp = v.power(1.0 - pc)
    ctx = Context([u, v, w, vp])
    for name, x in (("u", u), ("v", v), ("w", w)):
        _positivity(ctx, lambda t, x=x: ctx.head(x, t), f"int_0^t {name}")

    lu = lambda z: ctx.value(u, z)  # noqa: E731

    def inner(t):
        # log int_0^t w(s) sup_{z in (s,t)} u(z)^q ds
        return ctx.lower(t, lambda s, tt: ctx.value(w, s) + q * ctx.window_sup(lu, s, tt))

    if p <= q:
        val = ctx.sup(lambda t: clean(inner(t) / q + ctx.tail(vp, t) / pc))
        return _combine("I6", {"I6": val})
    r = p * q / (p - q)
    t = ctx.nodes.t
    s7 = ctx.suffix_sup(lambda z: r * ctx.value(u, z) + r / pc * ctx.tail(vp, z), t)
    f7 = r / p * ctx.head(w, t) + ctx.value(w, t) + s7
    s8 = ctx.suffix_sup(lambda z: q * ctx.value(u, z) + r / pc * ctx.tail(vp, z), t)
    f8 = r / p * ctx.at_nodes(inner) + ctx.value(w, t) + s8
    return _combine("I7+I8", {"I7": ctx.integral(f7) / r, "I8": ctx.integral(f8) / r})
