"""Shared numerical context for the nested functionals.

A :class:`Context` fixes one grid for a set of weights and offers

* cached log-quantities of any weight (value, head, tail, cumulative pairs)
  at the grid's Gauss nodes or at arbitrary points,
* quadrature layouts for ``int_0^t K(s, t) ds`` and ``int_x^inf K(x, s) ds``
  made of the full cells on one side of ``t`` plus a Gauss rule on the
  partial cell and a power-law end piece,
* one- and two-variable running suprema with golden-section polishing.

Everything is carried in logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .extended import INF, llse
from .quadrature import Nodes, T_MAX, T_MIN, integrate_nodes, log_span, make_points
from .scan import _grows, golden_rows, maximize_log_scan

CHUNK = 192
POLISH_ITERS = 16


def clean(x):
    """NaN from ``0 * inf`` style products becomes log 0."""
    x = np.asarray(x, dtype=float)
    out = np.where(np.isnan(x), -np.inf, x)
    return out if out.ndim else float(out)


def power_end(lt0, lt1, lf0, lf1, side):
    """Vectorised power-law end piece; see :func:`quadrature.end_extrapolation`."""
    with np.errstate(invalid="ignore", divide="ignore"):
        dt = lt1 - lt0
        slope = np.where(dt > 0, (lf1 - lf0) / np.where(dt > 0, dt, 1.0), 0.0)
        e = slope + 1.0
        if side == "lo":
            anchor_t, anchor_f = lt0, lf0
            ok = e > 0
            val = anchor_f + anchor_t - np.log(np.where(ok, e, 1.0))
        else:
            anchor_t, anchor_f = lt1, lf1
            ok = e < 0
            val = anchor_f + anchor_t - np.log(np.where(ok, -e, 1.0))
    out = np.where(ok, val, np.inf)
    finite = np.isfinite(lf0) & np.isfinite(lf1)
    out = np.where(finite, out, np.where(anchor_f == np.inf, np.inf, -np.inf))
    return np.where(anchor_f == -np.inf, -np.inf, out)


@dataclass
class Layout:
    """Quadrature nodes for a family of one-sided integrals, one row per base point."""

    base: np.ndarray        # (M,) the t (lower) or x (upper) of each row
    mask: np.ndarray        # (M, N) full nodes that belong to the row
    part: np.ndarray        # (M, n) Gauss nodes on the partial cell
    logw_part: np.ndarray   # (M, n)
    side: str               # "lo" for int_0^t, "hi" for int_x^inf


class Context:
    """Grid, nodes and cached quantities for a set of weights."""

    def __init__(self, weights, per_decade=16, n_gauss=8, lo=T_MIN, hi=T_MAX):
        weights = [w for w in weights if w is not None]
        self.points = make_points(weights, lo, hi, per_decade)
        self.nodes = Nodes.build(self.points, n_gauss)
        self.lo = float(self.points[0])
        self.hi = float(self.points[-1])
        # outer suprema stop short of the grid end so that inner integrals and
        # suprema over (x, inf) still see the part of the grid where they live
        self.outer_hi = self.hi / (100.0 if self.hi >= 0.99 * hi else 4.0)
        x, w = leggauss(n_gauss)
        self.gx = 0.5 * (x + 1.0)
        self.glogw = np.log(0.5 * w)
        self.n_gauss = n_gauss
        self.max_ratio = float(np.max(self.points[1:] / self.points[:-1]))
        self._cache = {}

    @property
    def span(self):
        return (self.lo, self.hi)

    # -- per-weight quantities ---------------------------------------------

    def _get(self, kind, w, t, fn):
        if t is self.nodes.t:
            key = (kind, id(w))
            hit = self._cache.get(key)
            if hit is None or hit[0] is not w:
                hit = (w, fn(t))
                self._cache[key] = hit
            return hit[1]
        return fn(t)

    def table(self, w):
        return w.table(self.points)

    def value(self, w, t):
        return self._get("value", w, t, w.log_value)

    def head(self, w, t):
        return self._get("head", w, t, lambda s: self.table(w).log_head(s))

    def tail(self, w, t):
        return self._get("tail", w, t, lambda s: self.table(w).log_tail(s))

    def cum(self, w, t):
        return self._get("cum", w, t, lambda s: self.table(w).cumulative(s))

    def total(self, w) -> float:
        return self.table(w).log_total

    def span_integral(self, w, s, t):
        """``log int_s^t w`` (zero for ``s >= t``)."""
        Ps, Qs = self.cum(w, s)
        Pt, Qt = self.cum(w, t)
        return log_span(Ps, Qs, Pt, Qt)

    def mu_mass(self, w, a, t):
        """``log int_0^t W^{-a} w`` with ``W`` the tail of ``w``, via its antiderivative."""
        lW = self.tail(w, t)
        lW0 = self.total(w)
        lH = self.head(w, t)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            ratio = np.exp(np.minimum(lH - lW0, 0.0))
            D = np.where(ratio < 0.5, -np.log1p(-ratio), lW0 - lW)
            D = np.where(lW0 == np.inf, np.inf, D)
            out = (1.0 - a) * lW + np.log(-np.expm1((1.0 - a) * D)) - math.log(a - 1.0)
        out = np.where(lW == -np.inf, np.inf, out)
        out = np.where(lH == -np.inf, -np.inf, out)
        return clean(out)

    # -- scans -------------------------------------------------------------

    def sup(self, log_profile):
        """Supremum over t of a log-profile; returns the log value."""
        return maximize_log_scan(log_profile, (0.0, INF), span=(self.lo, self.outer_hi)).value

    def integral(self, logf_nodes):
        """``log int_0^inf`` of a function given at the nodes."""
        return float(integrate_nodes(self.nodes, clean(logf_nodes)))

    def at_nodes(self, fn, chunk=CHUNK):
        """Evaluate a row-wise function of t at all nodes, in chunks."""
        t = self.nodes.t
        out = np.empty(t.size)
        for k in range(0, t.size, chunk):
            out[k:k + chunk] = fn(t[k:k + chunk])
        return out

    # -- one-sided layouts -------------------------------------------------

    def _cell(self, t):
        g = self.points
        return np.clip(np.searchsorted(g, t, side="right") - 1, 0, g.size - 2)

    def layout(self, base, side):
        base = np.atleast_1d(np.asarray(base, dtype=float))
        g = self.points
        i = self._cell(base)
        cell = self.nodes.cell
        if side == "lo":
            mask = cell[None, :] < i[:, None]
            a, b = np.log(g[i]), np.log(base)
        else:
            mask = cell[None, :] > i[:, None]
            a, b = np.log(base), np.log(g[i + 1])
        h = b - a
        with np.errstate(divide="ignore"):
            part = np.exp(a[:, None] + h[:, None] * self.gx[None, :])
            logw = np.log(np.maximum(h, 0.0))[:, None] + self.glogw[None, :] + np.log(part)
        return Layout(base, mask, part, logw, side)

    def _integrate(self, L: Layout, lf_full, lf_part, lf_end, s_end):
        """Row integrals from integrand logs at full nodes, partial nodes and two end points."""
        nd = self.nodes
        lf_full = clean(np.broadcast_to(lf_full, L.mask.shape))
        lf_part = clean(lf_part)
        body_full = np.where(L.mask, lf_full + nd.logw[None, :], -np.inf)
        body_part = np.where(np.isfinite(L.logw_part), lf_part + L.logw_part, -np.inf)
        body = np.logaddexp(llse(body_full, axis=1), llse(body_part, axis=1))
        lf_end = clean(np.broadcast_to(lf_end, (L.base.size, 2)))
        ls = np.log(np.broadcast_to(s_end, (L.base.size, 2)))
        end = power_end(ls[:, 0], ls[:, 1], lf_end[:, 0], lf_end[:, 1], L.side)
        # rows whose base point sits next to the grid end: the local slope there is
        # dominated by the kernel's behaviour at s = base, so a divergent fit is not
        # evidence of divergence; fall back to a constant (lo) or nothing (hi)
        if L.side == "lo":
            near = L.base < 4.0 * self.lo
            fallback = lf_end[:, 0] + math.log(self.lo)
        else:
            near = L.base > self.hi / 4.0
            fallback = np.full(L.base.size, -np.inf)
        fix = near & (end == np.inf) & np.isfinite(lf_end).all(axis=1)
        end = np.where(fix, fallback, end)
        with np.errstate(invalid="ignore"):
            out = np.logaddexp(body, end)
        return clean(out)

    def lower(self, t, kernel, chunk=CHUNK):
        """``log int_0^t K(s, t) ds``; ``kernel(s, t)`` must broadcast."""
        return self._one_sided(t, kernel, "lo", chunk)

    def upper(self, x, kernel, chunk=CHUNK):
        """``log int_x^inf K(x, s) ds``; ``kernel(x, s)`` must broadcast."""
        return self._one_sided(x, kernel, "hi", chunk)

    def _one_sided(self, base, kernel, side, chunk):
        base = np.atleast_1d(np.asarray(base, dtype=float))
        out = np.empty(base.size)
        s = self.nodes.t
        for k in range(0, base.size, chunk):
            L = self.layout(base[k:k + chunk], side)
            b = L.base[:, None]
            if side == "lo":
                # power law on (0, lo) fitted through lo and a point just above it
                sb = np.minimum(self.lo * 1.05, 0.5 * (b + self.lo))
                s_end = np.concatenate([np.full_like(sb, self.lo), sb], axis=1)
                full, part, end = kernel(s, b), kernel(L.part, b), kernel(s_end, b)
            else:
                # power law on (hi, inf) fitted through a point just below hi and hi
                sa = np.maximum(self.hi / 1.05, 0.5 * (b + self.hi))
                s_end = np.concatenate([sa, np.full_like(sa, self.hi)], axis=1)
                full, part, end = kernel(b, s), kernel(b, L.part), kernel(b, s_end)
            out[k:k + chunk] = self._integrate(L, full, part, end, s_end)
        return out

    # -- suprema -----------------------------------------------------------

    def sup_upper(self, x, F, chunk=CHUNK, polish=True):
        """``sup_{z > x} F(x, z)`` (log values), with growth towards the grid end as +inf."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty(x.size)
        s = self.nodes.t
        ls = np.log(s)
        far = np.searchsorted(ls, ls[-1] - math.log(10.0))
        for k in range(0, x.size, chunk):
            L = self.layout(x[k:k + chunk], "hi")
            b = L.base[:, None]
            full = np.where(L.mask, clean(np.broadcast_to(F(b, s), L.mask.shape)), -np.inf)
            part = clean(F(b, L.part))
            at_x = clean(F(b, b))[:, 0]
            n_part = part.shape[1]
            cand = np.concatenate([part, full], axis=1)
            zs = np.concatenate([L.part, np.broadcast_to(s, full.shape)], axis=1)
            j = np.argmax(cand, axis=1)
            rows = np.arange(cand.shape[0])
            best = cand[rows, j]
            zbest = zs[rows, j]
            with np.errstate(invalid="ignore"):
                grow = (j == cand.shape[1] - 1) & L.mask[:, far] & (
                    full[:, -1] - full[:, far] > math.log(2.0))
            # rows peaking in the last grid decades get the full growth test
            late = np.flatnonzero(~grow & L.mask[:, far] & (j >= n_part + far))
            for i in late:
                grow[i] = _grows(full[i], ls, at_end=True)
            if polish:
                r = math.log(self.max_ratio)
                lo = np.maximum(np.log(zbest) - r, np.log(L.base))
                hi = np.minimum(np.log(zbest) + r, math.log(self.hi))
                ok = np.isfinite(best) & (hi > lo)
                if ok.any():
                    bb = L.base[ok]
                    _, gv = golden_rows(lambda lz: clean(F(bb, np.exp(lz))), lo[ok], hi[ok], POLISH_ITERS)
                    best[ok] = np.maximum(best[ok], gv)
            best = np.maximum(best, at_x)
            out[k:k + chunk] = np.where(grow, np.inf, best)
        return out

    def dense(self):
        """Sorted union of nodes and grid points, used for one-variable running suprema."""
        d = getattr(self, "_dense", None)
        if d is None:
            d = np.unique(np.concatenate([self.nodes.t, self.points]))
            self._dense = d
        return d

    def prefix_sup(self, G, t, polish=True):
        """``sup_{s in (0, t)} G(s)``; growth towards the grid start gives +inf."""
        return self._running(G, t, "prefix", polish)

    def suffix_sup(self, G, t, polish=True):
        """``sup_{s in (t, inf)} G(s)``; growth towards the grid end gives +inf."""
        return self._running(G, t, "suffix", polish)

    def _running(self, G, t, kind, polish):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        d = self.dense()
        gd = clean(G(d))
        gt = clean(G(t))
        if kind == "prefix":
            acc = np.maximum.accumulate(gd)
            arg = _running_argmax(gd)
            idx = np.searchsorted(d, t, side="left") - 1
            has = idx >= 0
            best = np.where(has, acc[np.maximum(idx, 0)], -np.inf)
            barg = np.where(has, arg[np.maximum(idx, 0)], 0)
        else:
            acc = np.maximum.accumulate(gd[::-1])[::-1]
            arg = _running_argmax(gd[::-1])[::-1]
            arg = d.size - 1 - arg
            idx = np.searchsorted(d, t, side="right")
            has = idx < d.size
            best = np.where(has, acc[np.minimum(idx, d.size - 1)], -np.inf)
            barg = np.where(has, arg[np.minimum(idx, d.size - 1)], d.size - 1)
        if polish:
            ld = np.log(d)
            lo = ld[np.maximum(barg - 1, 0)]
            hi = ld[np.minimum(barg + 1, d.size - 1)]
            lt = np.log(t)
            if kind == "prefix":
                hi = np.minimum(hi, lt)
            else:
                lo = np.maximum(lo, lt)
            ok = has & np.isfinite(best) & (hi > lo)
            if ok.any():
                _, gv = golden_rows(lambda lz: clean(G(np.exp(lz))), lo[ok], hi[ok], POLISH_ITERS)
                best[ok] = np.maximum(best[ok], gv)
        out = np.maximum(best, gt)
        # growth of G towards the open end makes every running supremum infinite
        if _grows(gd, np.log(d), at_end=(kind == "suffix")):
            out = np.where(has, np.inf, out)
        return out

    def window_sup(self, G, s, t):
        """``sup_{z in (s, t)} G(z)`` on the dense set plus both ends; ``s`` and ``t`` broadcast."""
        d = self.dense()
        gd = clean(G(d))
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        flat_s, flat_t = s.ravel(), t.ravel()
        i0 = np.searchsorted(d, flat_s, side="right")
        i1 = np.searchsorted(d, flat_t, side="left")
        table = _SparseMax(gd)
        inner = table.query(i0, i1)
        ends = np.maximum(clean(G(flat_s)), clean(G(flat_t)))
        return np.maximum(inner, ends).reshape(s.shape)


def _running_argmax(x):
    idx = np.arange(x.size)
    best = np.where(x == np.maximum.accumulate(x), idx, 0)
    return np.maximum.accumulate(best)


class _SparseMax:
    """Range-maximum queries on a fixed array (sparse table)."""

    def __init__(self, x):
        self.levels = [x]
        k = 1
        while 2 * k <= x.size:
            prev = self.levels[-1]
            self.levels.append(np.maximum(prev[:-k], prev[k:]))
            k *= 2

    def query(self, i0, i1):
        """max of ``x[i0:i1]`` (-inf when empty)."""
        i0 = np.asarray(i0)
        i1 = np.asarray(i1)
        n = i1 - i0
        out = np.full(i0.shape, -np.inf)
        ok = n > 0
        if not ok.any():
            return out
        lev = np.zeros_like(n)
        lev[ok] = np.floor(np.log2(n[ok])).astype(int)
        for L in np.unique(lev[ok]):
            sel = ok & (lev == L)
            arr = self.levels[L]
            a = arr[i0[sel]]
            b = arr[i1[sel] - (1 << L)]
            out[sel] = np.maximum(a, b)
        return out

