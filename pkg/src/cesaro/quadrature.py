"""Log-domain quadrature over a fixed grid on (0, inf).

The integrals behind every functional are cumulative: heads ``int_0^t w`` and
tails ``int_t^inf w`` at many points.  ``WeightTable`` integrates a weight
once over every grid cell and answers head/tail queries at arbitrary points by
adding a partial cell.  All values are logs, so tails of ``exp(-t)`` at
``t = 1e6`` keep their relative accuracy.

Cell rule: on ``[a, b]`` the log-integrand ``phi`` is split into its secant
``phi(a) + k (t - a)`` and a remainder ``psi``.  Substituting the normalised
CDF of ``exp(k (t - a))`` leaves ``exp(psi)`` to a Gauss-Legendre rule, which
stays accurate across cells where the integrand changes by many orders of
magnitude.  End pieces use the power-law CDF near 0 and near infinity and
Gauss-Laguerre for exponential tails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.laguerre import laggauss
from numpy.polynomial.legendre import leggauss

from .extended import llse, lsub
from .weights import log_kernel

N_CELL = 16
N_END = 32

_gl_x, _gl_w = leggauss(N_CELL)
GL_X = 0.5 * (_gl_x + 1.0)
GL_LOGW = np.log(0.5 * _gl_w)
_ge_x, _ge_w = leggauss(N_END)
GE_X = 0.5 * (_ge_x + 1.0)
GE_LOGW = np.log(0.5 * _ge_w)
_la_x, _la_w = laggauss(N_END)
LA_X = _la_x
LA_LOGW = np.log(_la_w)


def _phi(t, par):
    return log_kernel(t, 0.0, par[1], par[2], par[3], par[4])


def cell_log_integral(a, b, par):
    """``log int_a^b`` of the kernel with parameters ``par`` (rows broadcast over a, b).

    ``par`` is a (5, ...) array of (logc, alpha, beta, gamma, delta); intervals
    must not straddle a segment boundary.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    logc = par[0]
    L = b - a
    pa = _phi(a, par)
    pb = _phi(b, par)
    kL = pb - pa
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        k = kL / L
        small = np.abs(kL) < 1e-9
        logZ = np.where(
            small, np.log(L) + 0.5 * kL,
            np.where(kL > 0, kL + np.log(-np.expm1(-np.abs(kL))) - np.log(np.abs(k)),
                     np.log(-np.expm1(-np.abs(kL))) - np.log(np.abs(k))))
        x = GL_X.reshape((-1,) + (1,) * a.ndim)
        t_pos = b + np.log(x + (1 - x) * np.exp(-np.abs(kL))) / k
        t_neg = a + np.log1p(x * np.expm1(-np.abs(kL))) / k
        t = np.where(small, a + x * L, np.where(kL > 0, t_pos, t_neg))
        t = np.clip(t, a, b)
        psi = _phi(t, par) - pa - np.where(small, kL * x, k * (t - a))
        out = logc + pa + logZ + llse(psi + GL_LOGW.reshape(x.shape), axis=0)
    out = np.where(L <= 0, -np.inf, out)
    out = np.where(logc == -np.inf, -np.inf, out)
    out = np.where(logc == np.inf, np.inf, out)
    return out


def head_log_integral(a, par):
    """``log int_0^a`` for a kernel valid on all of (0, a]."""
    logc, alpha, beta, gamma, delta = (float(v) for v in par)
    if logc == -np.inf or a <= 0:
        return -np.inf
    if logc == np.inf or delta > 0:
        return np.inf
    if delta < 0:
        # exp(delta/t) flattens the integrand at 0; integrate in u = 1/t from 1/a.
        return _log_quad_tail_in_inverse(a, par)
    e = alpha + 1.0
    if e <= 0:
        return np.inf
    t = a * GE_X ** (1.0 / e)
    with np.errstate(divide="ignore"):
        rest = beta * np.log1p(t) + gamma * t
    return logc + e * np.log(a) - np.log(e) + llse(rest + GE_LOGW)


def tail_log_integral(b, par):
    """``log int_b^inf`` for a kernel valid on all of [b, inf)."""
    logc, alpha, beta, gamma, delta = (float(v) for v in par)
    if logc == -np.inf:
        return -np.inf
    if logc == np.inf or gamma > 0:
        return np.inf
    if gamma < 0:
        y = LA_X / -gamma
        pb = float(_phi(np.float64(b), par))
        psi = _phi(b + y, par) - pb - gamma * y
        return logc + pb - np.log(-gamma) + llse(psi + LA_LOGW)
    e = alpha + beta
    if e >= -1:
        return np.inf
    t = b * GE_X ** (1.0 / (e + 1.0))
    rest = beta * np.log1p(1.0 / t) + delta / t
    return logc + (e + 1.0) * np.log(b) - np.log(-(e + 1.0)) + llse(rest + GE_LOGW)


def _log_quad_tail_in_inverse(a, par):
    # int_0^a f(t) dt = int_{1/a}^inf f(1/u) u^-2 du; the u-kernel has gamma' = delta < 0.
    logc, alpha, beta, gamma, delta = (float(v) for v in par)
    ua = 1.0 / a
    y = LA_X / -delta
    u = ua + y

    def phi_u(u):
        t = 1.0 / u
        return _phi(t, par) - 2.0 * np.log(u)

    pu = float(phi_u(np.float64(ua)))
    psi = phi_u(u) - pu - delta * y
    return logc + pu - np.log(-delta) + llse(psi + LA_LOGW)


class WeightTable:
    """Cumulative log-integrals of one weight on a grid.

    ``points`` is extended with the weight's own breakpoints so that no cell
    straddles a segment boundary.  Query points must lie in
    ``[points[0], points[-1]]``.
    """

    def __init__(self, weight, points):
        pts = np.asarray(points, dtype=float)
        bp = weight.breakpoints
        bp = bp[(bp > pts[0]) & (bp < pts[-1])]
        self.points = np.unique(np.concatenate([pts, bp]))
        self.weight = weight
        g = self.points
        par_cells = weight.params_at(0.5 * (g[:-1] + g[1:]))
        self.cells = cell_log_integral(g[:-1], g[1:], par_cells)
        first = weight.params_at(np.float64(g[0] * 0.5))
        last = weight.params_at(np.float64(g[-1] * 2.0))
        if weight.breakpoints.size and weight.breakpoints[0] < g[0]:
            self.head0 = _head_split(weight, g[0])
        else:
            self.head0 = float(head_log_integral(g[0], first))
        if weight.breakpoints.size and weight.breakpoints[-1] > g[-1]:
            self.tailN = _tail_split(weight, g[-1])
        else:
            self.tailN = float(tail_log_integral(g[-1], last))
        with np.errstate(invalid="ignore"):
            self.LH = np.concatenate([[-np.inf], np.logaddexp.accumulate(self.cells)])
            rev = np.logaddexp.accumulate(np.concatenate([[self.tailN], self.cells[::-1]]))
            self.LT = rev[::-1]
            self.log_total = float(np.logaddexp(np.logaddexp(self.head0, self.LH[-1]), self.tailN))

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        g = self.points
        if np.any(t < g[0] * (1 - 1e-12)) or np.any(t > g[-1] * (1 + 1e-12)):
            raise ValueError("query point outside the tabulated grid")
        i = np.clip(np.searchsorted(g, t, side="right") - 1, 0, g.size - 2)
        return t, i

    def log_from_start(self, t):
        """``log int_{points[0]}^t``."""
        t, i = self._locate(t)
        part = cell_log_integral(self.points[i], t, self.weight.params_at(t))
        with np.errstate(invalid="ignore"):
            return np.logaddexp(self.LH[i], part)

    def log_head(self, t):
        """``log int_0^t``."""
        with np.errstate(invalid="ignore"):
            return np.logaddexp(self.head0, self.log_from_start(t))

    def log_tail(self, t):
        """``log int_t^inf``."""
        t, i = self._locate(t)
        part = cell_log_integral(t, self.points[i + 1], self.weight.params_at(t))
        with np.errstate(invalid="ignore"):
            return np.logaddexp(part, self.LT[i + 1])

    def cumulative(self, t):
        """``(log int_{points[0]}^t, log int_t^inf)`` for use with :func:`log_span`."""
        return self.log_from_start(t), self.log_tail(t)


def log_span(P_s, Q_s, P_t, Q_t):
    """``log int_s^t`` from cumulative pairs; zero where ``s >= t``.

    Uses whichever of the head or tail differences has the smaller magnitude,
    which bounds the cancellation error by the smaller of the two.
    """
    hd = lsub(P_t, P_s)
    tl = lsub(Q_s, Q_t)
    use_head = (Q_s == np.inf) | (P_t <= Q_s)
    return np.where(use_head, hd, tl)


def _head_split(weight, a):
    out = -np.inf
    for seg in weight.segments:
        lo = float(seg.lo)
        if lo >= a:
            break
        hi = min(seg.hi_float, a)
        par = np.array([seg.logc, float(seg.alpha), float(seg.beta), float(seg.gamma), float(seg.delta)])
        if lo == 0:
            v = head_log_integral(hi, par)
        else:
            v = float(cell_log_integral(np.float64(lo), np.float64(hi), par))
        out = np.logaddexp(out, v)
    return float(out)


def _tail_split(weight, b):
    out = -np.inf
    for seg in weight.segments:
        hi = seg.hi_float
        if hi <= b:
            continue
        lo = max(float(seg.lo), b)
        par = np.array([seg.logc, float(seg.alpha), float(seg.beta), float(seg.gamma), float(seg.delta)])
        if hi == np.inf:
            v = tail_log_integral(lo, par)
        else:
            v = float(cell_log_integral(np.float64(lo), np.float64(hi), par))
        out = np.logaddexp(out, v)
    return float(out)


# -- grids and node sets ----------------------------------------------------

T_MIN = 1e-10
T_MAX = 1e10


def make_points(weights=(), lo=T_MIN, hi=T_MAX, per_decade=16, extra=()):
    """Geometric grid on [lo, hi] with all weight breakpoints inserted.

    When every weight carries an exponential factor the grid stops at ``60/g``
    for the slowest rate ``g``; otherwise it runs to ``hi``, since a ratio of
    an exponential and a power can grow without bound.  The fastest rate ``G``
    adds a linear refinement of step ``1/(2G)`` from ``1/G`` up to ``60/g``
    (at most 600 extra points).
    """
    weights = [w for w in weights if not w.is_zero()]
    all_rates = [w.exp_rate for w in weights]
    rates = [r for r in all_rates if r > 0]
    pts = []
    if rates:
        slow, fast = min(rates), max(rates)
        reach = max(60.0 / slow, 10.0 * lo)
        if min(all_rates) > 0:
            hi = min(hi, reach)
        start = 1.0 / fast
        end = min(hi, reach)
        if start < end:
            step = max(0.5 / fast, (end - start) / 600.0)
            pts.append(np.arange(start, end, step))
    n = int(np.ceil(np.log10(hi / lo) * per_decade)) + 1
    pts.append(np.geomspace(lo, hi, n))
    for w in weights:
        bp = w.breakpoints
        pts.append(bp[(bp > lo) & (bp < hi)])
    pts.append(np.asarray([x for x in extra if lo < x < hi], dtype=float))
    g = np.unique(np.concatenate(pts))
    keep = np.concatenate([[True], np.diff(g) > 1e-12 * g[1:]])
    return g[keep]


@dataclass(frozen=True)
class Nodes:
    """Gauss-Legendre nodes (in log t) for every cell of a grid."""

    points: np.ndarray
    t: np.ndarray        # node abscissas, increasing
    logw: np.ndarray     # log quadrature weights including dt = t ds
    cell: np.ndarray     # cell index of each node

    @classmethod
    def build(cls, points, n=8):
        x, w = leggauss(n)
        s = np.log(points)
        mid = 0.5 * (s[:-1] + s[1:])
        half = 0.5 * (s[1:] - s[:-1])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        logw = (np.log(half)[:, None] + np.log(w)[None, :]).ravel() + nodes
        cell = np.repeat(np.arange(points.size - 1), n)
        return cls(points, np.exp(nodes), logw, cell)


def end_extrapolation(logt, logf, side):
    """Log-integral of a power law fitted through two end samples of ``f``.

    ``side='lo'`` integrates from 0 to ``t[0]``, ``side='hi'`` from ``t[-1]`` to
    infinity.  Returns +inf when the fitted power law is not integrable there.
    """
    if side == "lo":
        (t0, t1), (f0, f1) = logt[:2], logf[:2]
        anchor_t, anchor_f = t0, f0
    else:
        (t0, t1), (f0, f1) = logt[-2:], logf[-2:]
        anchor_t, anchor_f = t1, f1
    if anchor_f == -np.inf:
        return -np.inf
    if not np.isfinite(f0) or not np.isfinite(f1):
        return np.inf if anchor_f == np.inf else -np.inf
    slope = (f1 - f0) / (t1 - t0)
    e = slope + 1.0
    if side == "lo":
        return anchor_f + anchor_t - np.log(e) if e > 0 else np.inf
    return anchor_f + anchor_t - np.log(-e) if e < 0 else np.inf


def integrate_nodes(nodes: Nodes, logf, axis=-1, ends=True):
    """``log int_0^inf f`` from log-values at ``nodes`` (last axis), with power-law ends."""
    logf = np.asarray(logf, dtype=float)
    body = llse(logf + nodes.logw, axis=axis)
    if not ends:
        return body
    lt = np.log(nodes.t)
    f = np.moveaxis(logf, axis, -1)
    lo = np.apply_along_axis(lambda r: end_extrapolation(lt, r, "lo"), -1, f)
    hi = np.apply_along_axis(lambda r: end_extrapolation(lt, r, "hi"), -1, f)
    with np.errstate(invalid="ignore"):
        out = np.logaddexp(np.logaddexp(body, lo), hi)
    return out
