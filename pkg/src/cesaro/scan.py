"""Supremum scans: a log-spaced grid followed by golden-section refinement.

A scan over ``(a, b)`` works in the variable ``u = log(t - a)``, so points
crowd towards the left endpoint and spread out towards infinity.  For
``a = 0`` this is the log grid ``t = x/(1-x)`` with ``x`` running through
(0, 1).  Values that keep growing towards either end (see ``_grows``) are
reported as unbounded.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .extended import INF

N_SCAN = 512
EPS_SUP = 1e-10
SPAN = (1e-9, 1e9)
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
LOG2 = math.log(2.0)


@dataclass
class ScanResult:
    """Outcome of a scan; unpacks as ``argmax, value``."""

    argmax: float
    value: float
    evaluations: int = 0
    failures: int = 0
    unbounded: bool = False
    grid: np.ndarray = field(default=None, repr=False)
    grid_values: np.ndarray = field(default=None, repr=False)

    def __iter__(self):
        yield self.argmax
        yield self.value


def offsets(a, b, n=N_SCAN, span=SPAN):
    """Scan abscissas in (a, b]: ``a + d`` with ``d`` log-spaced."""
    lo_span, hi_span = span
    d_hi = (b - a) if b < INF else max(hi_span - a, hi_span * 1e-3)
    d_lo = min(lo_span * max(1.0, a), d_hi * 1e-6)
    return np.linspace(math.log(d_lo), math.log(d_hi), n)


class _Evaluator:
    def __init__(self, fn, a, log_values):
        self.fn = fn
        self.a = a
        self.log_values = log_values
        self.count = 0
        self.failures = 0

    def __call__(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        t = self.a + np.exp(u)
        self.count += t.size
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DeprecationWarning)
                vals = np.asarray(self.fn(t), dtype=float)
            if vals.shape != t.shape:
                raise ValueError("shape mismatch")
        except Exception:
            vals = np.empty_like(t)
            for i, ti in enumerate(t):
                try:
                    vals[i] = float(self.fn(np.float64(ti)))
                except Exception:
                    vals[i] = np.nan
        bad = np.isnan(vals)
        if not self.log_values:
            bad |= vals < 0
        if bad.any():
            self.failures += int(bad.sum())
            vals = np.where(bad, -np.inf if self.log_values else 0.0, vals)
        return vals


def _grows(vals, u, at_end):
    """Unbounded growth towards one end of the scan.

    Two tests on the decade next to that end (its outermost half decade left
    out, since inner suprema and integrals are truncated by the grid there):
    monotone growth by more than a factor 2 per decade, or sustained power
    growth, i.e. at least 5% per decade with a slope that has not dropped
    below 0.7 of the slope over the decade before.
    """
    dec = math.log(10.0)
    # an empty inner range at the very end of the grid shows up as -inf; skip it
    fin = np.flatnonzero(np.isfinite(vals))
    if fin.size < 3:
        return False
    vals, u = vals[fin[0]:fin[-1] + 1], u[fin[0]:fin[-1] + 1]
    if not at_end:
        vals, u = vals[::-1], -u[::-1]

    def window(k):
        sel = (u >= u[-1] - (k + 1.5) * dec) & (u <= u[-1] - (k + 0.5) * dec)
        seg = vals[sel]
        if seg.size < 3 or not np.all(np.diff(seg) > 0):
            return None
        return (seg[-1] - seg[0]) / ((u[sel][-1] - u[sel][0]) / dec)

    s1 = window(0)
    if s1 is None:
        return False
    if s1 > LOG2:
        return True
    s0 = window(1)
    return s0 is not None and s1 >= math.log(1.05) and s1 >= 0.7 * s0


def maximize_log_scan(log_g, interval=(0.0, INF), n=N_SCAN, span=SPAN, tol=EPS_SUP,
                      detect_growth=True) -> ScanResult:
    """Scan a vectorised log-valued function; ``value`` is a log."""
    a, b = float(interval[0]), float(interval[1])
    u = offsets(a, b, n, span)
    ev = _Evaluator(log_g, a, True)
    vals = ev(u)
    return _finish(ev, u, vals, a, b, tol, detect_growth)


def maximize_scan(g, interval=(0.0, INF), n=N_SCAN, span=SPAN, tol=EPS_SUP) -> ScanResult:
    """Supremum of a nonnegative function over an interval of (0, inf).

    ``g`` may be vectorised or scalar; points where it raises or returns NaN
    count as 0 and are tallied in ``failures``.  Returns ``(argmax, value)``.
    """
    a, b = float(interval[0]), float(interval[1])
    if a < 0 or not a < b:
        raise ValueError(f"invalid scan interval ({a}, {b})")
    def log_g(t):
        with np.errstate(divide="ignore"):
            return np.log(g(t))

    ev_log = _Evaluator(log_g, a, True)
    u = offsets(a, b, n, span)
    vals = ev_log(u)
    res = _finish(ev_log, u, vals, a, b, tol, True)
    res.value = math.exp(res.value) if res.value < 709.7 else INF
    return res


def _finish(ev, u, vals, a, b, tol, detect_growth):
    i = int(np.argmax(vals))
    best_u, best = u[i], vals[i]
    unbounded = bool(best == INF)
    if not unbounded and detect_growth and math.isfinite(best):
        hi_open = b == INF
        if (hi_open and _grows(vals, u, True)) or _grows(vals, u, False):
            unbounded = True
    if not unbounded and math.isfinite(best):
        lo = u[max(i - 1, 0)]
        hi = u[min(i + 1, u.size - 1)]
        gu, gv = golden(ev, lo, hi, tol)
        if gv > best:
            best_u, best = gu, gv
    res = ScanResult(a + math.exp(best_u), INF if unbounded else float(best), ev.count, ev.failures,
                     unbounded, a + np.exp(u), vals)
    return res


def golden(f, lo, hi, tol=EPS_SUP, max_iter=200):
    """Golden-section search for a maximum of ``f`` on [lo, hi]; returns (x, f(x))."""
    if hi - lo <= tol:
        x = 0.5 * (lo + hi)
        return x, float(f(x)[0])
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = (float(v) for v in f(np.array([c, d])))
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = float(f(np.array([c]))[0])
            if fc > best_f:
                best_x, best_f = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = float(f(np.array([d]))[0])
            if fd > best_f:
                best_x, best_f = d, fd
    return best_x, best_f


def golden_rows(f, lo, hi, iters=40):
    """Row-wise golden-section maxima; ``f`` maps an (m,) array of abscissas to values."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc = f(c)
    fd = f(d)
    best_x = np.where(fc >= fd, c, d)
    best_f = np.maximum(fc, fd)
    for _ in range(iters):
        left = fc >= fd
        lo2 = np.where(left, lo, c)
        hi2 = np.where(left, d, hi)
        x_new = np.where(left, hi2 - INV_PHI * (hi2 - lo2), lo2 + INV_PHI * (hi2 - lo2))
        f_new = f(x_new)
        c, d, fc, fd = (np.where(left, x_new, d), np.where(left, c, x_new),
                        np.where(left, f_new, fd), np.where(left, fc, f_new))
        lo, hi = lo2, hi2
        better = f_new > best_f
        best_x = np.where(better, x_new, best_x)
        best_f = np.where(better, f_new, best_f)
    return best_x, best_f
