"""Regimes, admissibility and the characterizing functionals A_1 .. A_14 for

    ( int ( int_0^t f^p v )^{q/p} u )^{1/q}  <=  C ( int ( int_0^t f )^theta w )^{1/theta}.

All functionals are evaluated in logs on a shared :class:`~cesaro.kernels.Context`.
Writing ``V(x, t) = int_x^t v^{1/(1-p)}``, ``U`` and ``W`` for the tails of
``u`` and ``w``, and ``dmu = W^{-a} w`` with ``a = theta/(theta-p)`` (p < 1)
or ``a = theta/(theta-1)`` (p = 1), every functional is a composition of
one-sided integrals and suprema of these quantities.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import weights as wm
from .errors import AdmissibilityError, DegenerateWeightError, UnsupportedRegimeError
from .extended import INF, exp_of, to_json_value
from .kernels import Context, clean

EPS_PARAM = 1e-12
CHECK_POINTS = np.geomspace(1e-8, 1e8, 64)

DEFERRAL_NOTE = ("the case q < p (and the boundary q = p) is outside the characterizations "
                 "implemented here; no constant is computed")


class TrivialRegimeError(UnsupportedRegimeError):
    """p > 1: only trivial functions satisfy the inequality."""


class OutOfRegimeWarning(UserWarning):
    pass


# -- parameters and regimes ----------------------------------------------------

def as_number(x):
    """Ints, Fractions and strings become exact rationals; floats stay floats."""
    if isinstance(x, bool):
        raise TypeError("boolean is not a parameter")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return float(x)


@dataclass(frozen=True)
class Parameters:
    p: object
    q: object
    theta: object

    def __post_init__(self):
        for name in ("p", "q", "theta"):
            x = as_number(getattr(self, name))
            if not (0 < x < INF):
                raise ValueError(f"{name} must be positive and finite, got {x}")
            object.__setattr__(self, name, x)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in (self.p, self.q, self.theta))

    def eq(self, a, b) -> bool:
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return a == b
        return abs(float(a) - float(b)) <= EPS_PARAM

    def lt(self, a, b) -> bool:
        return a < b and not self.eq(a, b)

    def le(self, a, b) -> bool:
        return a < b or self.eq(a, b)

    @property
    def floats(self) -> Tuple[float, float, float]:
        return float(self.p), float(self.q), float(self.theta)

    def to_dict(self):
        return {k: str(getattr(self, k)) for k in ("p", "q", "theta")}

    @classmethod
    def parse(cls, text: str) -> "Parameters":
        parts = [s for s in text.replace(" ", "").split(",") if s]
        if len(parts) != 3:
            raise ValueError(f"expected p,q,theta, got {text!r}")
        return cls(*(as_number(s) for s in parts))


FORMULAS: Dict[str, Tuple[int, ...]] = {
    "T1a": (1,), "T1b": (2,), "T2": (3,),
    "T3a": (4, 5), "T3b": (4, 6, 7), "T3c": (5, 8, 9), "T3d": (7, 8, 10),
    "T4a": (11, 12), "T4b": (11, 13, 14),
}
TAGS = tuple(FORMULAS) + ("Trivial_p_gt_1", "KnownElsewhere_p_eq_q_or_theta_eq_1",
                          "Unsupported_q_le_p", "Unsupported_other")


@dataclass(frozen=True)
class Regime:
    tag: str
    formulas: Tuple[int, ...]

    @property
    def is_theorem_case(self) -> bool:
        return bool(self.formulas)


def regime_predicates(P: Parameters) -> Dict[str, bool]:
    """Every tag's defining condition, evaluated independently."""
    p, q, th = P.p, P.q, P.theta
    one = Fraction(1)
    eq, lt, le = P.eq, P.lt, P.le
    trivial = lt(one, p)
    t1 = le(th, p) and lt(p, one) and lt(p, q)
    p1 = eq(p, one)
    t2 = p1 and le(th, one) and lt(one, q)
    t3 = lt(p, one) and lt(p, q) and lt(p, th)
    t4 = p1 and lt(one, q) and lt(one, th)
    out = {
        "T1a": t1 and le(one, q),
        "T1b": t1 and lt(q, one),
        "T2": t2,
        "T3a": t3 and le(max(one, th), q),
        "T3b": t3 and le(one, q) and lt(q, th),
        "T3c": t3 and le(th, q) and lt(q, one),
        "T3d": t3 and lt(q, min(one, th)),
        "T4a": t4 and le(th, q),
        "T4b": t4 and lt(q, th),
        "Trivial_p_gt_1": trivial,
    }
    theorem = any(out[k] for k in FORMULAS)
    q_le_p = (not trivial) and (lt(q, p) or eq(q, p))
    out["Unsupported_q_le_p"] = q_le_p and not theorem
    out["KnownElsewhere_p_eq_q_or_theta_eq_1"] = (
        (eq(p, q) or eq(th, one)) and not theorem and not trivial and not q_le_p)
    out["Unsupported_other"] = not any(out.values())
    return out


def classify_regime(P: Parameters) -> Regime:
    fired = [k for k, v in regime_predicates(P).items() if v]
    if len(fired) != 1:
        raise AssertionError(f"regime predicates overlap for {P}: {fired}")
    tag = fired[0]
    return Regime(tag, FORMULAS.get(tag, ()))


# -- problems ----------------------------------------------------------------

@dataclass
class ReducedProblem:
    params: Parameters
    u: wm.Weight
    v: wm.Weight
    w: wm.Weight

    def with_weights(self, **kw) -> "ReducedProblem":
        d = dict(u=self.u, v=self.v, w=self.w)
        d.update(kw)
        return ReducedProblem(self.params, **d)

    def to_dict(self):
        return {"params": self.params.to_dict(), "u": self.u.to_dict(),
                "v": self.v.to_dict(), "w": self.w.to_dict()}


def reduce_embedding(p1, q1, p2, q2, u1, v1, u2, v2) -> ReducedProblem:
    """Map the embedding Ces_{p1,q1}(u1,v1) -> Ces_{p2,q2}(u2,v2) onto the reduced inequality."""
    p1, q1, p2, q2 = (as_number(x) for x in (p1, q1, p2, q2))
    for x in (p1, q1, p2, q2):
        if not 0 < x < INF:
            raise ValueError("exponents must be positive and finite")
    if any(seg.logc == -INF for seg in v1.segments) or (
            isinstance(v1, wm.TabulatedWeight) and np.any(v1.y == 0)):
        raise DegenerateWeightError("v1 vanishes on part of (0, inf) and cannot be inverted")
    params = Parameters(p2 / p1, q2 / p1, q1 / p1)
    v = wm.product(v1.power(-p2), v2.power(p2))
    return ReducedProblem(params, u2.power(q2), v, u1.power(q1))


def copson_to_cesaro(q_i, p_i, u_i, v_i):
    """Tilde weights ``t^{-2/q} u(1/t)`` and ``t^{-2/p} v(1/t)``."""
    return wm.tilde(u_i, as_number(q_i)), wm.tilde(v_i, as_number(p_i))


# -- admissibility -------------------------------------------------------------

@dataclass
class Hypothesis:
    name: str
    passed: bool
    t: Optional[float] = None
    value: Optional[float] = None

    def to_dict(self):
        return {"name": self.name, "passed": self.passed,
                "t": None if self.t is None else to_json_value(self.t),
                "value": None if self.value is None else to_json_value(self.value)}


@dataclass
class Admissibility:
    entries: List[Hypothesis] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(h.passed for h in self.entries)

    @property
    def failures(self) -> List[Hypothesis]:
        return [h for h in self.entries if not h.passed]

    def to_list(self):
        return [h.to_dict() for h in self.entries]


def _grid_check(name, grid, logs, lower_ok=True) -> Hypothesis:
    """``0 < value < inf`` at every grid point (only ``< inf`` if not ``lower_ok``)."""
    logs = np.asarray(logs, dtype=float)
    bad = (logs == np.inf) | np.isnan(logs)
    if lower_ok:
        bad |= logs == -np.inf
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        return Hypothesis(name, False, float(grid[i]), exp_of(logs[i]) if not np.isnan(logs[i]) else INF)
    return Hypothesis(name, True)


# -- functionals -----------------------------------------------------------------

_NEEDS = {
    "p != 1": (1, 2, 4, 5, 6, 7, 8, 9, 10),
    "q != 1": (2, 8, 9, 10),
    "theta != p": (5, 6, 7, 9, 10),
    "theta != q": (6, 7, 10, 13, 14),
    "theta != 1": (12, 13, 14),
}


class Evaluator:
    """All A-functionals of one problem on one grid, with shared intermediate results."""

    def __init__(self, problem: ReducedProblem, proof_variant: bool = False, per_decade: int = 16):
        self.problem = problem
        self.P = problem.params
        p, q, th = self.P.floats
        self.p, self.q, self.th = p, q, th
        self.u, self.v, self.w = problem.u, problem.v, problem.w
        self.proof_variant = proof_variant
        self.vr = self.v.power(Fraction(1) / (1 - as_number(self.P.p))) if not self.P.eq(self.P.p, 1) else None
        self.ctx = Context([self.u, self.v, self.w, self.vr], per_decade=per_decade)
        self._memo = {}

    def _once(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    # basic quantities
    def U(self, t):
        return self.ctx.tail(self.u, t)

    def W(self, t):
        return self.ctx.tail(self.w, t)

    def V(self, s, t):
        return self.ctx.span_integral(self.vr, s, t)

    def log_mu(self, t, a):
        return clean(-a * self.W(t) + self.ctx.value(self.w, t))

    def M(self, t, a):
        return self.ctx.mu_mass(self.w, a, t)

    def L5(self, t, exponent=None):
        """``log int_0^t V(s,t)^k dmu(s)`` with ``k = theta(1-p)/(theta-p)`` by default."""
        p, th = self.p, self.th
        a = th / (th - p)
        k = th * (1 - p) / (th - p) if exponent is None else exponent
        return self.ctx.lower(t, lambda s, tt: self.log_mu(s, a) + k * self.V(s, tt))

    def J(self, x):
        """``log int_x^inf V(x,t)^{q(1-p)/(p(1-q))} U(t)^{q/(1-q)} u(t) dt``."""
        p, q = self.p, self.q
        k = q * (1 - p) / (p * (1 - q))
        return self.ctx.upper(x, lambda xx, t: k * self.V(xx, t) + q / (1 - q) * self.U(t)
                              + self.ctx.value(self.u, t))

    def L12(self, t):
        """``log int_0^t sup_{z in (x,t)} v(z)^{th'} dmu(x)`` with ``dmu = W^{-th'} w``."""
        tp = self.th / (self.th - 1)
        lv = lambda z: self.ctx.value(self.v, z)  # noqa: E731
        return self.ctx.lower(t, lambda x, tt: self.log_mu(x, tp) + tp * self.ctx.window_sup(lv, x, tt))

    # the functionals (logs)
    def A1(self):
        p, q, th = self.p, self.q, self.th

        def inner(x):
            return self.ctx.sup_upper(x, lambda xx, t: (1 - p) / p * self.V(xx, t) + self.U(t) / q)

        return self.ctx.sup(lambda x: clean(-self.W(x) / th + inner(x)))

    def A2(self):
        q, th = self.q, self.th
        return self.ctx.sup(lambda x: clean(-self.W(x) / th + (1 - q) / q * self.J(x)))

    def A3(self):
        q, th = self.q, self.th
        G = lambda s: clean(self.ctx.value(self.v, s) - self.W(s) / th)  # noqa: E731
        return self.ctx.sup(lambda t: clean(self.U(t) / q + self.ctx.prefix_sup(G, t)))

    def A4(self):
        p, q, th = self.p, self.q, self.th
        s = self.ctx.sup(lambda t: clean((1 - p) / p * self.ctx.head(self.vr, t) + self.U(t) / q))
        return clean(-self.ctx.total(self.w) / th + s)

    def A5(self):
        p, q, th = self.p, self.q, self.th
        return self.ctx.sup(lambda t: clean((th - p) / (th * p) * self.L5(t) + self.U(t) / q))

    def _outer(self, inner_nodes, inner_exp, a, sup_nodes):
        t = self.ctx.nodes.t
        f = inner_exp * inner_nodes + self.log_mu(t, a) + sup_nodes
        return self.ctx.integral(clean(f))

    def _sup_V_U(self, kV, kU):
        return self.ctx.at_nodes(lambda x: self.ctx.sup_upper(
            x, lambda xx, z: kV * self.V(xx, z) + kU * self.U(z)))

    def A6(self):
        p, q, th = self.p, self.q, self.th
        a = th / (th - p)
        t = self.ctx.nodes.t
        S = self._once("S6", lambda: self._sup_V_U(th * q * (1 - p) / (p * (th - q)), th / (th - q)))
        val = self._outer(self.M(t, a), th * (q - p) / (p * (th - q)), a, S)
        return (th - q) / (th * q) * val

    def A7(self):
        p, q, th = self.p, self.q, self.th
        a = th / (th - p)
        k_in = th * (q - p) / (th - p) if self.proof_variant else th * (1 - p) / (th - p)
        L = self._once(("L5n", k_in), lambda: self.ctx.at_nodes(lambda t: self.L5(t, k_in)))
        S = self._once("S7", lambda: self._sup_V_U(th * (1 - p) / (th - p), th / (th - q)))
        val = self._outer(L, th * (q - p) / (p * (th - q)), a, S)
        return (th - q) / (th * q) * val

    def A8(self):
        p, q, th = self.p, self.q, self.th
        k = q * (1 - p) / (p * (1 - q))
        t = self.ctx.nodes.t
        f = k * self.ctx.head(self.vr, t) + q / (1 - q) * self.U(t) + self.ctx.value(self.u, t)
        return clean(-self.ctx.total(self.w) / th + (1 - q) / q * self.ctx.integral(clean(f)))

    def A9(self):
        p, q, th = self.p, self.q, self.th
        a = th / (th - p)
        return self.ctx.sup(lambda t: clean((th - p) / (th * p) * self.M(t, a) + (1 - q) / q * self.J(t)))

    def A10(self):
        p, q, th = self.p, self.q, self.th
        a = th / (th - p)
        t = self.ctx.nodes.t
        Jn = self._once("Jn", lambda: self.ctx.at_nodes(self.J))
        val = self._outer(self.M(t, a), th * (q - p) / (p * (th - q)), a, th * (1 - q) / (th - q) * Jn)
        return (th - q) / (th * q) * val

    def A11(self):
        q, th = self.q, self.th
        v = self.v

        def ess(t):
            return np.log(np.array([v.ess_sup(0.0, float(x)) for x in np.atleast_1d(t)]))

        s = self.ctx.sup(lambda t: clean(self.U(t) / q + ess(t)))
        return clean(-self.ctx.total(self.w) / th + s)

    def A12(self):
        q, th = self.q, self.th
        return self.ctx.sup(lambda t: clean((th - 1) / th * self.L12(t) + self.U(t) / q))

    def A13(self):
        q, th = self.q, self.th
        tp = th / (th - 1)
        t = self.ctx.nodes.t
        G = lambda z: clean(th * q / (th - q) * self.ctx.value(self.v, z) + th / (th - q) * self.U(z))  # noqa: E731
        S = self.ctx.suffix_sup(G, t)
        val = self._outer(self.M(t, tp), th * (q - 1) / (th - q), tp, S)
        return (th - q) / (th * q) * val

    def A14(self):
        q, th = self.q, self.th
        tp = th / (th - 1)
        t = self.ctx.nodes.t
        G = lambda z: clean(tp * self.ctx.value(self.v, z) + th / (th - q) * self.U(z))  # noqa: E731
        S = self.ctx.suffix_sup(G, t)
        L = self._once("L12n", lambda: self.ctx.at_nodes(self.L12))
        val = self._outer(L, th * (q - 1) / (th - q), tp, S)
        return (th - q) / (th * q) * val

    def log_functional(self, index: int) -> float:
        P = self.P
        checks = {"p != 1": P.eq(P.p, 1), "q != 1": P.eq(P.q, 1), "theta != p": P.eq(P.theta, P.p),
                  "theta != q": P.eq(P.theta, P.q), "theta != 1": P.eq(P.theta, 1)}
        for cond, idx in _NEEDS.items():
            if index in idx and checks[cond]:
                raise UnsupportedRegimeError(f"A_{index} has a degenerate exponent: needs {cond}")
        if index in (11, 12, 13, 14) and not P.eq(P.p, 1):
            raise UnsupportedRegimeError(f"A_{index} is defined for p = 1 only")
        if index == 3 and not P.eq(P.p, 1):
            raise UnsupportedRegimeError("A_3 is defined for p = 1 only")
        if not 1 <= index <= 14:
            raise ValueError(f"no functional A_{index}")
        # inf - inf in log sums is resolved by clean()
        with np.errstate(invalid="ignore"):
            return float(getattr(self, f"A{index}")())

    # admissibility
    def admissibility(self, regime: Regime) -> Admissibility:
        ctx = self.ctx
        grid = CHECK_POINTS[(CHECK_POINTS >= ctx.lo) & (CHECK_POINTS <= ctx.hi)]
        out = Admissibility()
        out.entries.append(Hypothesis("w is a weight (positive and finite)", self.w.is_weight_class()))
        out.entries.append(_grid_check("int_t^inf w < inf", grid, self.W(grid), lower_ok=False))
        tag = regime.tag
        if tag.startswith("T3"):
            out.entries.append(_grid_check("0 < int_0^t V(s,t)^{th(1-p)/(th-p)} dmu(s) < inf",
                                           grid, self.L5(grid)))
        if tag.startswith("T4"):
            q, th = self.q, self.th
            tp = th / (th - 1)
            out.entries.append(_grid_check("0 < int_0^t v^{th/(th-1)} < inf", grid,
                                           ctx.table(self.v.power(tp)).log_head(grid)
                                           if not self.v.is_zero() else np.full(grid.size, -np.inf)))
            out.entries.append(_grid_check("0 < int_0^t W^{-th/(th-1)} w < inf", grid, self.M(grid, tp)))
            ui = self.u.power(Fraction(-1) / (as_number(self.P.q) - 1)) if not self.u.is_zero() else None
            out.entries.append(_grid_check("0 < int_0^t u^{-1/(q-1)} < inf", grid,
                                           ctx.table(ui).log_head(grid) if ui is not None
                                           else np.full(grid.size, np.inf)))
            out.entries.append(Hypothesis("v continuous", _continuous(self.v)))
        return out


def _continuous(w) -> bool:
    for left, right in zip(w.segments[:-1], w.segments[1:]):
        b = np.float64(float(right.lo))
        lv, rv = float(left.log_value(b)), float(right.log_value(b))
        if lv != rv and not (np.isfinite(lv) and np.isfinite(rv) and abs(lv - rv) <= 1e-9 * max(1, abs(lv))):
            return False
    return True


def check_admissibility(problem: ReducedProblem, regime: Optional[Regime] = None) -> Admissibility:
    regime = regime or classify_regime(problem.params)
    return Evaluator(problem).admissibility(regime)


def functional_A(index: int, problem: ReducedProblem, proof_variant: bool = False) -> float:
    """Value of A_index; out-of-regime calls are evaluated but flagged with a warning."""
    regime = classify_regime(problem.params)
    if index not in regime.formulas:
        warnings.warn(f"A_{index} evaluated outside its regime ({regime.tag})", OutOfRegimeWarning)
    return exp_of(Evaluator(problem, proof_variant).log_functional(index))


# -- reports -------------------------------------------------------------------

@dataclass
class ConstantReport:
    regime: Regime
    params: Parameters
    components: Dict[int, float]
    admissibility: Admissibility
    diagnostics: Dict[str, object] = field(default_factory=dict)

    @property
    def combined(self) -> float:
        vals = list(self.components.values())
        return INF if any(v == INF for v in vals) else float(sum(vals))

    @property
    def applicable(self) -> bool:
        return self.admissibility.passed

    @property
    def verdict(self) -> str:
        return "applicable" if self.applicable else "not-applicable"

    def to_dict(self):
        return {
            "regime": self.regime.tag,
            "formulas": [f"A{i}" for i in self.regime.formulas],
            "params": self.params.to_dict(),
            "components": {f"A{i}": to_json_value(v) for i, v in self.components.items()},
            "combined": to_json_value(self.combined),
            "verdict": self.verdict,
            "admissibility": self.admissibility.to_list(),
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _refuse(regime: Regime):
    if regime.tag == "Trivial_p_gt_1":
        raise TrivialRegimeError(
            "p > 1: the inequality holds only for trivial functions; "
            "use oracle.triviality_probe (CLI: oracle --triviality) to exhibit the blow-up")
    if regime.tag == "KnownElsewhere_p_eq_q_or_theta_eq_1":
        raise UnsupportedRegimeError("p = q or theta = 1 with no implemented characterization")
    raise UnsupportedRegimeError(f"{regime.tag}: {DEFERRAL_NOTE}")


def embedding_constant(problem: ReducedProblem, proof_variant: bool = False,
                       per_decade: int = 16, lazy: bool = False) -> ConstantReport:
    """All functionals of the problem's regime.

    With ``lazy`` the functionals are skipped when admissibility fails, and
    evaluation stops at the first infinite one (the report is then partial).
    """
    regime = classify_regime(problem.params)
    if not regime.is_theorem_case:
        _refuse(regime)
    ev = Evaluator(problem, proof_variant, per_decade)
    adm = ev.admissibility(regime)
    comps = {}
    if not (lazy and not adm.passed):
        for i in regime.formulas:
            comps[i] = float(exp_of(ev.log_functional(i)))
            if lazy and comps[i] == INF:
                break
    diag = {"grid_points": int(ev.ctx.points.size), "nodes": int(ev.ctx.nodes.t.size),
            "grid_range": [to_json_value(ev.ctx.lo), to_json_value(ev.ctx.hi)],
            "proof_variant_A7": bool(proof_variant)}
    return ConstantReport(regime, problem.params, comps, adm, diag)


__all__ = [
    "Parameters", "Regime", "ReducedProblem", "ConstantReport", "Admissibility", "Hypothesis",
    "classify_regime", "regime_predicates", "check_admissibility", "functional_A",
    "embedding_constant", "reduce_embedding", "copson_to_cesaro", "Evaluator",
    "TrivialRegimeError", "OutOfRegimeWarning", "AdmissibilityError", "DegenerateWeightError",
    "UnsupportedRegimeError", "DEFERRAL_NOTE", "TAGS", "FORMULAS",
]
