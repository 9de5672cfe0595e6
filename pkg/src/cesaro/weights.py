"""Weights on the half-line (0, inf).

Two representations are supported:

* analytic: an ordered partition of (0, inf) into segments, each carrying the
  map ``t -> c * t**alpha * (1+t)**beta * exp(gamma*t + delta/t)``;
* tabulated: samples ``(t_i, y_i)`` joined by power laws (linear in log-log
  coordinates) and continued past both ends with the boundary slope.

A tabulated weight is a piecewise power law, so both representations share the
same segment machinery.  Exponents and breakpoints are kept as exact rationals
so that exponent arithmetic (powers, products, the ``t -> 1/t`` transform) is
exact.  The ``delta`` term is what makes analytic weights closed under
``t -> 1/t``; it defaults to zero.
"""

from __future__ import annotations

import json
import math
import threading
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import integrate as _integrate

from .extended import INF, from_json_value, to_json_value

EPS_QUAD = 1e-9


class WeightDocumentError(ValueError):
    """A weight document could not be parsed; ``location`` points at the offending entry."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def exact(x) -> Fraction:
    """Exact rational value of a number (floats are taken at their binary value)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite exponent or breakpoint {x!r}")
    return Fraction(x)


def _log(x: float) -> float:
    if x == 0:
        return -INF
    return math.log(x)


@dataclass(frozen=True)
class Segment:
    """``exp(logc) * t**alpha * (1+t)**beta * exp(gamma*t + delta/t)`` on ``[lo, hi)``.

    ``hi is None`` stands for +inf.
    """

    lo: Fraction
    hi: Fraction | None
    logc: float
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    gamma: Fraction = Fraction(0)
    delta: Fraction = Fraction(0)

    @property
    def c(self) -> float:
        return math.exp(self.logc) if self.logc < 710 else INF

    @property
    def hi_float(self) -> float:
        return INF if self.hi is None else float(self.hi)

    def log_value(self, t):
        t = np.asarray(t, dtype=float)
        return log_kernel(t, self.logc, float(self.alpha), float(self.beta),
                          float(self.gamma), float(self.delta))

    def log_limit_at_zero(self) -> float:
        if self.logc == -INF:
            return -INF
        if self.delta != 0:
            return INF if self.delta > 0 else -INF
        if self.alpha != 0:
            return INF if self.alpha < 0 else -INF
        return self.logc

    def log_limit_at_inf(self) -> float:
        if self.logc == -INF:
            return -INF
        if self.gamma != 0:
            return INF if self.gamma > 0 else -INF
        e = self.alpha + self.beta
        if e != 0:
            return INF if e > 0 else -INF
        return self.logc

    def diverges_at_zero(self) -> bool:
        if self.logc == -INF:
            return False
        if self.delta != 0:
            return self.delta > 0
        return self.alpha <= -1

    def diverges_at_inf(self) -> bool:
        if self.logc == -INF:
            return False
        if self.gamma != 0:
            return self.gamma > 0
        return self.alpha + self.beta >= -1

    def critical_points(self):
        """Interior stationary points of the log-value, from the cubic
        ``gamma t^3 + (alpha+beta+gamma) t^2 + (alpha-delta) t - delta``."""
        a, b, g, d = (float(x) for x in (self.alpha, self.beta, self.gamma, self.delta))
        coeffs = np.array([g, a + b + g, a - d, -d])
        nz = np.flatnonzero(np.abs(coeffs) > 0)
        if nz.size == 0 or nz[0] == 3:
            return np.empty(0)
        roots = np.roots(coeffs[nz[0]:])
        roots = roots[np.abs(roots.imag) <= 1e-12 * np.maximum(1.0, np.abs(roots.real))].real
        return roots[roots > 0]

    def powered(self, s: Fraction) -> "Segment":
        if s == 0:
            return Segment(self.lo, self.hi, 0.0)
        logc = self.logc * float(s)
        return replace(self, logc=logc, alpha=self.alpha * s, beta=self.beta * s,
                       gamma=self.gamma * s, delta=self.delta * s)


def log_kernel(t, logc, alpha, beta, gamma, delta):
    """Vectorised log of ``c t^alpha (1+t)^beta exp(gamma t + delta/t)``."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = alpha * np.log(t) + beta * np.log1p(t) + gamma * t + delta / t
        out = out + logc
    return np.where(np.isnan(out), -np.inf, out)


class Weight:
    """A nonnegative function on (0, inf) given by a segment partition."""

    kind = "analytic"

    def __init__(self, segments):
        segments = tuple(segments)
        if not segments:
            raise WeightDocumentError("a weight needs at least one segment")
        if segments[0].lo != 0:
            raise WeightDocumentError("first segment must start at 0", "segments[0].from")
        for i, seg in enumerate(segments):
            if seg.hi is not None and seg.hi <= seg.lo:
                raise WeightDocumentError("empty or reversed segment", f"segments[{i}]")
            if i + 1 < len(segments):
                if seg.hi is None or segments[i + 1].lo != seg.hi:
                    raise WeightDocumentError("segments must be contiguous", f"segments[{i + 1}].from")
            if math.isnan(seg.logc):
                raise WeightDocumentError("coefficient is NaN", f"segments[{i}].c")
        if segments[-1].hi is not None:
            raise WeightDocumentError("last segment must extend to infinity", f"segments[{len(segments) - 1}].to")
        self.segments = segments
        self._lo = np.array([float(s.lo) for s in segments])
        self._par = np.array([[s.logc, float(s.alpha), float(s.beta), float(s.gamma), float(s.delta)]
                              for s in segments])
        self._lock = threading.Lock()
        self._tails: dict[float, float] = {}
        self._tables: dict = {}

    # -- evaluation -------------------------------------------------------
    def segment_index(self, t):
        return np.clip(np.searchsorted(self._lo, t, side="right") - 1, 0, len(self.segments) - 1)

    def params_at(self, t):
        """Segment parameters (logc, alpha, beta, gamma, delta) in force at each t."""
        return np.moveaxis(self._par[self.segment_index(t)], -1, 0)

    def log_value(self, t):
        t = np.asarray(t, dtype=float)
        return log_kernel(t, *self.params_at(t))

    def __call__(self, t):
        with np.errstate(over="ignore"):
            out = np.exp(self.log_value(t))
        return out if np.ndim(out) else float(out)

    @property
    def breakpoints(self) -> np.ndarray:
        return self._lo[1:].copy()

    @property
    def exp_rate(self) -> float:
        """Largest |gamma| over segments with a nonzero coefficient."""
        rates = [abs(float(s.gamma)) for s in self.segments if s.logc > -INF]
        return max(rates, default=0.0)

    def is_zero(self) -> bool:
        return all(s.logc == -INF for s in self.segments)

    def is_weight_class(self) -> bool:
        """Positive and finite at every segment (analytic) or sample (tabulated)."""
        return all(-INF < s.logc < INF for s in self.segments)

    # -- integrals --------------------------------------------------------
    def integrate(self, a: float, b: float = INF, eps: float = EPS_QUAD) -> float:
        """Integral of the weight over (a, b); +inf when divergent.

        Pieces reaching infinity are mapped to (0, 1) by ``t = x/(1-x)`` before
        adaptive quadrature.  Divergence is decided from the exponents.
        """
        a = float(a)
        b = float(b)
        if a < 0:
            raise ValueError(f"lower limit must be nonnegative, got {a}")
        if a > b:
            raise ValueError(f"empty interval: a={a} > b={b}")
        if a == b:
            return 0.0
        total = 0.0
        for seg in self.segments:
            lo = max(a, float(seg.lo))
            hi = min(b, seg.hi_float)
            if lo >= hi or seg.logc == -INF:
                continue
            if seg.logc == INF:
                return INF
            if lo == 0 and seg.diverges_at_zero():
                return INF
            if hi == INF and seg.diverges_at_inf():
                return INF
            total += _quad_segment(seg, lo, hi, eps)
        return total

    def tail(self, t: float) -> float:
        """``integrate(t, inf)``, memoised per point."""
        t = float(t)
        if t < 0:
            raise ValueError(f"tail point must be nonnegative, got {t}")
        with self._lock:
            hit = self._tails.get(t)
        if hit is not None:
            return hit
        val = self.integrate(t, INF)
        with self._lock:
            self._tails[t] = val
        return val

    def table(self, points):
        """Cached cumulative table on the given grid (see ``quadrature.WeightTable``)."""
        from .quadrature import WeightTable

        points = np.asarray(points, dtype=float)
        key = (points.size, float(points[0]), float(points[-1]), hash(points.tobytes()))
        with self._lock:
            tab = self._tables.get(key)
        if tab is None:
            tab = WeightTable(self, points)
            with self._lock:
                tab = self._tables.setdefault(key, tab)
        return tab

    def ess_sup(self, a: float = 0.0, b: float = INF) -> float:
        """Supremum over (a, b) of the continuous representative."""
        a = float(a)
        b = float(b)
        if not a < b:
            raise ValueError(f"ess_sup needs a < b, got ({a}, {b})")
        best = -INF
        for seg in self.segments:
            lo = max(a, float(seg.lo))
            hi = min(b, seg.hi_float)
            if lo >= hi or seg.logc == -INF:
                continue
            cands = [seg.log_limit_at_zero() if lo == 0 else float(seg.log_value(lo)),
                     seg.log_limit_at_inf() if hi == INF else float(seg.log_value(hi))]
            crit = seg.critical_points()
            crit = crit[(crit > lo) & (crit < hi)]
            if crit.size:
                cands.extend(np.atleast_1d(seg.log_value(crit)).tolist())
            best = max(best, max(cands))
        return math.exp(best) if best < 710 else INF

    # -- algebra ----------------------------------------------------------
    def power(self, s) -> "Weight":
        """Pointwise ``w**s`` (``0**negative`` is +inf, ``w**0`` is 1)."""
        s = exact(s)
        return Weight([seg.powered(s) for seg in self.segments])

    def scale(self, lam: float) -> "Weight":
        lam = float(lam)
        if lam < 0:
            raise ValueError("weights are nonnegative")
        dl = _log(lam)
        return Weight([replace(seg, logc=_lmul(seg.logc, dl)) for seg in self.segments])

    def __mul__(self, other: "Weight") -> "Weight":
        return product(self, other)

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict:
        out = []
        for seg in self.segments:
            d = {"c": to_json_value(seg.c), "alpha": _num(seg.alpha), "beta": _num(seg.beta),
                 "gamma": _num(seg.gamma), "from": _num(seg.lo),
                 "to": None if seg.hi is None else _num(seg.hi)}
            if seg.delta != 0:
                d["delta"] = _num(seg.delta)
            out.append(d)
        return {"segments": out}

    def __eq__(self, other):
        return isinstance(other, Weight) and self.kind == other.kind and self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    def __repr__(self):
        return f"{type(self).__name__}({len(self.segments)} segments)"


class TabulatedWeight(Weight):
    """Samples joined log-linearly, continued with the boundary power-law slopes.

    An interval touching a zero sample is zero; so is a continuation whose
    boundary interval is.
    """

    kind = "tabulated"

    def __init__(self, t, y):
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        if t.ndim != 1 or t.shape != y.shape or t.size == 0:
            raise WeightDocumentError("samples must be a nonempty list of [t, value] pairs", "samples")
        if np.any(~np.isfinite(t)) or np.any(t <= 0):
            raise WeightDocumentError("abscissas must be positive and finite", "samples")
        if np.any(np.diff(t) <= 0):
            bad = int(np.flatnonzero(np.diff(t) <= 0)[0]) + 1
            raise WeightDocumentError("abscissas must be strictly increasing", f"samples[{bad}]")
        if np.any(np.isnan(y)) or np.any(y < 0):
            raise WeightDocumentError("sample values must be nonnegative", "samples")
        self.t = t
        self.y = y
        super().__init__(_tabulated_segments(t, y))

    def power(self, s) -> "TabulatedWeight":
        s = float(s)
        if s < 0 and np.any(self.y == 0):
            raise ValueError("negative power of a tabulated weight with zero samples")
        with np.errstate(divide="ignore"):
            return TabulatedWeight(self.t, self.y ** s)

    def scale(self, lam: float) -> "TabulatedWeight":
        return TabulatedWeight(self.t, self.y * float(lam))

    def is_weight_class(self) -> bool:
        return bool(np.all((self.y > 0) & np.isfinite(self.y)))

    def to_dict(self) -> dict:
        return {"samples": [[float(a), to_json_value(b)] for a, b in zip(self.t, self.y)]}

    def __eq__(self, other):
        return (isinstance(other, TabulatedWeight) and np.array_equal(self.t, other.t)
                and np.array_equal(self.y, other.y))

    def __hash__(self):
        return hash((self.t.tobytes(), self.y.tobytes()))


def _tabulated_segments(t, y):
    n = t.size
    logy = np.log(np.where(y > 0, y, 1.0))
    pos = y > 0
    if n == 1:
        return [Segment(Fraction(0), None, float(logy[0]) if pos[0] else -INF)]

    def piece(i, lo, hi):
        if not (pos[i] and pos[i + 1]):
            return Segment(lo, hi, -INF)
        s = (logy[i + 1] - logy[i]) / (math.log(t[i + 1]) - math.log(t[i]))
        return Segment(lo, hi, float(logy[i] - s * math.log(t[i])), exact(s))

    knots = [exact(x) for x in t]
    segs = [piece(0, Fraction(0), knots[0])]
    segs += [piece(i, knots[i], knots[i + 1]) for i in range(n - 1)]
    segs.append(piece(n - 2, knots[-1], None))
    return segs


def _num(x: Fraction):
    if x.denominator == 1:
        return int(x)
    if Fraction(float(x)) == x:
        return float(x)
    return f"{x.numerator}/{x.denominator}"     # keeps 1/3 exact


def _lmul(a: float, b: float) -> float:
    out = a + b
    return -INF if math.isnan(out) else out


def _quad_segment(seg: Segment, lo: float, hi: float, eps: float) -> float:
    par = (seg.logc, float(seg.alpha), float(seg.beta), float(seg.gamma), float(seg.delta))

    def f(t):
        return math.exp(min(float(log_kernel(np.float64(t), *par)), 709.0)) if t > 0 else 0.0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        if hi < INF:
            val, _ = _integrate.quad(f, lo, hi, epsabs=0.0, epsrel=eps, limit=400)
            return val

        def g(x):
            if x >= 1.0:
                return 0.0
            return f(x / (1.0 - x)) / (1.0 - x) ** 2

        x0 = lo / (1.0 + lo)
        val, _ = _integrate.quad(g, x0, 1.0, epsabs=0.0, epsrel=eps, limit=400)
        return val


# -- constructors ---------------------------------------------------------

def analytic(c=1.0, alpha=0, beta=0, gamma=0, delta=0) -> Weight:
    """Single-segment weight ``c t^alpha (1+t)^beta exp(gamma t + delta/t)``."""
    return Weight([Segment(Fraction(0), None, _log(float(c)), exact(alpha), exact(beta),
                           exact(gamma), exact(delta))])


def constant(c=1.0) -> Weight:
    return analytic(c)


def zero() -> Weight:
    return analytic(0.0)


def indicator(a, b, c=1.0) -> Weight:
    """``c`` on (a, b) and zero elsewhere; ``b=None`` means infinity."""
    a = exact(a)
    b = None if b is None or b == INF else exact(b)
    segs = []
    if a > 0:
        segs.append(Segment(Fraction(0), a, -INF))
    segs.append(Segment(a, b, _log(float(c))))
    if b is not None:
        segs.append(Segment(b, None, -INF))
    return Weight(segs)


def piecewise(pieces) -> Weight:
    """Analytic weight from ``[(lo, hi, c, alpha, beta, gamma), ...]`` with ``hi=None`` for inf."""
    segs = []
    for piece in pieces:
        lo, hi, c, *ex = piece
        ex = list(ex) + [0] * (4 - len(ex))
        segs.append(Segment(exact(lo), None if hi is None else exact(hi), _log(float(c)),
                            *(exact(e) for e in ex)))
    return Weight(segs)


def product(*weights: Weight) -> Weight:
    """Pointwise product; exact on segments.  All-tabulated inputs stay tabulated."""
    if not weights:
        return constant(1.0)
    if all(isinstance(w, TabulatedWeight) for w in weights):
        t = np.unique(np.concatenate([w.t for w in weights]))
        logs = sum(np.asarray(w.log_value(t)) for w in weights)
        with np.errstate(over="ignore"):
            return TabulatedWeight(t, np.exp(np.where(np.isnan(logs), -np.inf, logs)))
    bounds = sorted({s.lo for w in weights for s in w.segments})
    segs = []
    for i, lo in enumerate(bounds):
        hi = bounds[i + 1] if i + 1 < len(bounds) else None
        parts = [next(s for s in w.segments if s.lo <= lo and (s.hi is None or lo < s.hi))
                 for w in weights]
        logc = 0.0
        for s in parts:
            logc = _lmul(logc, s.logc)
        segs.append(Segment(lo, hi, logc, sum((s.alpha for s in parts), Fraction(0)),
                            sum((s.beta for s in parts), Fraction(0)),
                            sum((s.gamma for s in parts), Fraction(0)),
                            sum((s.delta for s in parts), Fraction(0))))
    return Weight(segs)


# -- documents ------------------------------------------------------------

def tilde(w: Weight, s) -> Weight:
    """``t**(-2/s) * w(1/t)``; an involution for every fixed ``s``.

    A segment ``c t^a (1+t)^b e^{g t + d/t}`` on ``[lo, hi)`` becomes
    ``c t^(-a-b-2/s) (1+t)^b e^{d t + g/t}`` on ``[1/hi, 1/lo)``.
    """
    s = exact(s)
    k = Fraction(2) / s
    if isinstance(w, TabulatedWeight):
        t = w.t[::-1]
        return TabulatedWeight(1.0 / t, t ** float(k) * w.y[::-1])
    segs = []
    for seg in reversed(w.segments):
        lo = Fraction(0) if seg.hi is None else 1 / seg.hi
        hi = None if seg.lo == 0 else 1 / seg.lo
        segs.append(Segment(lo, hi, seg.logc, -seg.alpha - seg.beta - k, seg.beta, seg.delta, seg.gamma))
    return Weight(segs)


def from_dict(doc) -> Weight:
    if not isinstance(doc, dict):
        raise WeightDocumentError("weight document must be an object")
    if ("segments" in doc) == ("samples" in doc):
        raise WeightDocumentError("exactly one of 'segments' or 'samples' is required")
    if "samples" in doc:
        rows = doc["samples"]
        if not isinstance(rows, list) or not rows:
            raise WeightDocumentError("must be a nonempty list", "samples")
        t, y = [], []
        for i, row in enumerate(rows):
            if not isinstance(row, (list, tuple)) or len(row) != 2:
                raise WeightDocumentError("expected [t, value]", f"samples[{i}]")
            try:
                t.append(float(row[0]))
                y.append(from_json_value(row[1]))
            except (TypeError, ValueError) as exc:
                raise WeightDocumentError(str(exc), f"samples[{i}]") from None
        return TabulatedWeight(t, y)
    segs = []
    rows = doc["segments"]
    if not isinstance(rows, list) or not rows:
        raise WeightDocumentError("must be a nonempty list", "segments")
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            raise WeightDocumentError("expected an object", f"segments[{i}]")
        try:
            c = from_json_value(row.get("c", 1.0))
            if c < 0:
                raise ValueError("coefficient must be nonnegative")
            hi = row.get("to")
            segs.append(Segment(exact(row.get("from", 0)), None if hi is None else exact(hi), _log(c),
                                exact(row.get("alpha", 0)), exact(row.get("beta", 0)),
                                exact(row.get("gamma", 0)), exact(row.get("delta", 0))))
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, WeightDocumentError):
                raise
            raise WeightDocumentError(str(exc), f"segments[{i}]") from None
    return Weight(segs)


def load(path) -> Weight:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise WeightDocumentError(f"invalid JSON ({exc.msg})", f"{path}:{exc.lineno}:{exc.colno}") from None
    try:
        return from_dict(doc)
    except WeightDocumentError as exc:
        where = f"{path}:{exc.location}" if exc.location else str(path)
        raise WeightDocumentError(exc.args[0].split(": ", 1)[-1] if exc.location else str(exc), where) from None


def dumps(w: Weight) -> str:
    return json.dumps(w.to_dict(), sort_keys=True)
