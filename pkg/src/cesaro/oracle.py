"""Brute-force lower bounds for best constants, by direct search over step functions.

The main-inequality evaluator is piecewise exact in the inner integral (sums of
``h_k^p int v`` over pieces) and uses Gauss rules on every piece for the outer
integral, so batches of height vectors on a fixed knot set are evaluated in one
vectorised pass.  :func:`ces_norm_riemann` is an independent trapezoid route used
to cross-check it.

The search is a fixed sequence: characteristic functions on a 32 x 32 grid of
intervals, then seeded coordinate-ascent runs.  A budget only truncates that
sequence, so a larger budget never returns a smaller value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import weights as wm
from .embedding import ReducedProblem
from .errors import AdmissibilityError, UnsupportedRegimeError
from .extended import INF, exp_of, llse, to_json_value
from .quadrature import log_span, make_points

KNOT_RANGE = (1e-5, 1e5)
N_PIECES = 128
N_CHI = 32
FACTORS = (4.0, 2.0, 1.25, 1.05)
LEVELS = (16, 32, 64, 128)
MIN_GAIN = 1e-12
FLOOR = 1e-6
BATCH = 256
MIN_BUDGET = N_CHI * (N_CHI - 1) // 2


@dataclass
class StepFunction:
    """Value ``heights[k]`` on ``(breakpoints[k], breakpoints[k+1])``, zero elsewhere."""

    breakpoints: np.ndarray
    heights: np.ndarray

    def __post_init__(self):
        self.breakpoints = np.asarray(self.breakpoints, dtype=float)
        self.heights = np.asarray(self.heights, dtype=float)
        b, h = self.breakpoints, self.heights
        if h.ndim != 1 or h.size < 1 or b.shape != (h.size + 1,):
            raise ValueError("need n >= 1 heights and n + 1 breakpoints")
        if b[0] < 0 or np.any(~np.isfinite(b)) or np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be nonnegative, finite and increasing")
        if np.any(h < 0) or np.any(~np.isfinite(h)):
            raise ValueError("heights must be nonnegative and finite")

    @classmethod
    def indicator(cls, a, b, c=1.0):
        return cls([a, b], [c])

    def scaled(self, lam):
        return StepFunction(self.breakpoints, self.heights * lam)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        i = np.searchsorted(self.breakpoints, t, side="right") - 1
        inside = (i >= 0) & (i < self.heights.size)
        return np.where(inside, self.heights[np.clip(i, 0, self.heights.size - 1)], 0.0)

    def compressed(self) -> "StepFunction":
        """Merge equal neighbours and drop zero pieces at both ends."""
        h, b = self.heights, self.breakpoints
        nz = np.flatnonzero(h > 0)
        if nz.size == 0:
            return StepFunction(b[:2], h[:1] * 0)
        h = h[nz[0]:nz[-1] + 1]
        b = b[nz[0]:nz[-1] + 2]
        keep = np.concatenate([[True], h[1:] != h[:-1]])
        return StepFunction(np.concatenate([b[:-1][keep], b[-1:]]), h[keep])

    def to_dict(self):
        return {"breakpoints": [float(x) for x in self.breakpoints],
                "heights": [float(x) for x in self.heights]}


# -- norms ------------------------------------------------------------------------

class NormEvaluator:
    """``log`` of ``( int ( int_0^t f^p v )^{q/p} u )^{1/q}`` for step functions on fixed knots."""

    def __init__(self, knots, inner_p, outer_q, v, u, n_gauss=16):
        knots = np.asarray(knots, dtype=float)
        self.knots = knots
        self.p = float(inner_p)
        self.q = float(outer_q)
        K = knots.size - 1
        extra = [u.breakpoints, v.breakpoints]
        gam = [float(sg.gamma) for wt in (u, v) for sg in getattr(wt, "segments", ()) if sg.logc > -np.inf]
        rate = max(map(abs, gam), default=0.0)
        if rate > 0:
            # cells wider than the decay length get sub-cells at the end where the mass sits
            a, b = knots[:-1], knots[1:]
            wide = (b - a) * rate > 0.5
            d = np.array([0.25, 1.0, 4.0, 12.0, 40.0]) / rate
            if min(gam) < 0:
                extra.append((a[wide, None] + d[None, :]).ravel())
            if max(gam) > 0:
                extra.append((b[wide, None] - d[None, :]).ravel())
        # long cells are split geometrically so that power-type integrands stay resolved
        a, b = knots[:-1], knots[1:]
        for lo, hi in zip(a, b):
            if lo > 0 and hi > 2 * lo:
                extra.append(np.geomspace(lo, hi, int(np.ceil(np.log2(hi / lo))) + 1)[1:-1])
            elif lo == 0:
                extra.append(hi * 0.5 ** np.arange(1, 30))
        extra = np.concatenate(extra)
        extra = extra[(extra > knots[0]) & (extra < knots[-1])]
        sub = np.unique(np.concatenate([knots, extra]))
        # nodes: t = a + (b-a) y^2 on each sub-cell, clustering at the cell start where
        # the inner integral may vanish like a power
        x, wg = leggauss(n_gauss)
        y = 0.5 * (x + 1.0)
        a, b = sub[:-1], sub[1:]
        t = a[:, None] + (b - a)[:, None] * y[None, :] ** 2
        logw = np.log(b - a)[:, None] + np.log(wg * y)[None, :]  # 2y dy times the 1/2 Gauss factor
        piece = np.searchsorted(knots, 0.5 * (a + b), side="right") - 1
        self.piece = np.repeat(piece, n_gauss)
        t = t.ravel()
        self.t = t
        self.logw = logw.ravel()
        pos = sub[sub > 0]
        lo, hi = min(pos[0], t.min(), 1e-10), max(knots[-1], 1e10)
        pts = np.unique(np.concatenate([make_points([u, v], lo, hi, 8), pos]))
        tv, tu = v.table(pts), u.table(pts)

        def span(s0, s1):
            # log int_{s0}^{s1} v, with s0 = 0 allowed
            s0 = np.asarray(s0, dtype=float)
            out = log_span(*tv.cumulative(np.maximum(s0, lo)), *tv.cumulative(s1))
            return np.where(s0 == 0, tv.log_head(s1), out)

        self.logP = span(knots[self.piece], t)
        self.logV = span(knots[:-1], knots[1:])
        self.lu = u.log_value(t)
        self.U_end = float(tu.log_tail(np.float64(knots[-1])))
        self.K = K

    def log_norm(self, logh):
        """Batch of log heights (B, K) -> log norms (B,)."""
        logh = np.atleast_2d(np.asarray(logh, dtype=float))
        p, q = self.p, self.q
        with np.errstate(invalid="ignore"):
            a = p * logh
            full = a + self.logV[None, :]
            full = np.where(np.isnan(full), -np.inf, full)
            C = np.logaddexp.accumulate(full, axis=1)
            Cprev = np.concatenate([np.full((C.shape[0], 1), -np.inf), C[:, :-1]], axis=1)
            F = np.logaddexp(Cprev[:, self.piece], a[:, self.piece] + self.logP[None, :])
            body = llse((q / p) * F + self.lu[None, :] + self.logw[None, :], axis=1)
            end = (q / p) * C[:, -1] + self.U_end
            out = np.logaddexp(body, np.where(np.isnan(end), -np.inf, end))
        return np.where(np.isnan(out), -np.inf, out) / q


def _log_heights(h):
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(h, dtype=float))


def ces_norm(f: StepFunction, inner_p, outer_q, v, u) -> float:
    """``( int_0^inf ( int_0^t f^p v )^{q/p} u dt )^{1/q}`` for a step function ``f``."""
    if not np.any(f.heights > 0):
        return 0.0
    ev = NormEvaluator(f.breakpoints, inner_p, outer_q, v, u)
    return exp_of(float(ev.log_norm(_log_heights(f.heights)[None, :])[0]))


def ces_norm_riemann(f: StepFunction, inner_p, outer_q, v, u, n=100_000, t_max=None) -> float:
    """Independent trapezoid evaluation on ``n`` log-spaced points plus the knots.

    The inner integral accumulates ``f^p v`` by trapezoids within pieces; the
    outer integral is a trapezoid sum up to ``t_max``, followed by the exact
    tail ``F(t_max)^{q/p} int_{t_max}^inf u`` computed by adaptive quadrature.
    """
    p, q = float(inner_p), float(outer_q)
    b = f.breakpoints
    t_min = b[0] if b[0] > 0 else b[1] * 1e-8
    t_max = t_max or max(b[-1] * 1e3, 1e3)
    jumps = np.concatenate([u.breakpoints, v.breakpoints])
    jumps = jumps[(jumps > t_min) & (jumps < t_max)]
    grid = np.unique(np.concatenate([[b[0]], np.geomspace(t_min, t_max, n), b, jumps]))
    left, right = grid[:-1], np.nextafter(grid[1:], -np.inf)   # one-sided limits at the jumps
    mid = 0.5 * (grid[1:] + grid[:-1])
    fp = f(mid) ** p
    inc = fp * 0.5 * (v(left) + v(right)) * np.diff(grid)
    F = np.concatenate([[0.0], np.cumsum(inc)])
    with np.errstate(divide="ignore", invalid="ignore"):
        Fq = np.where(F > 0, F ** (q / p), 0.0)
    body = float(np.sum(0.5 * (Fq[:-1] * u(left) + Fq[1:] * u(right)) * np.diff(grid)))
    tail = F[-1] ** (q / p) * u.integrate(t_max) if F[-1] > 0 else 0.0
    return (body + tail) ** (1.0 / q)


# -- ratio of the main inequality ------------------------------------------------

class RatioEvaluator:
    """Batched ``log(LHS/RHS)`` of the main inequality on fixed knots."""

    def __init__(self, problem: ReducedProblem, knots):
        p, q, th = problem.params.floats
        self.lhs = NormEvaluator(knots, p, q, problem.v, problem.u)
        self.rhs = NormEvaluator(knots, 1.0, th, wm.constant(1.0), problem.w)
        self.knots = np.asarray(knots, dtype=float)

    def __call__(self, logh):
        L = self.lhs.log_norm(logh)
        R = self.rhs.log_norm(logh)
        with np.errstate(invalid="ignore"):
            out = L - R
        out = np.where(L == -np.inf, -np.inf, out)      # 0/0 = 0 and 0/x = 0
        out = np.where((R == -np.inf) & (L > -np.inf), np.inf, out)
        return out


def ratio(f: StepFunction, problem: ReducedProblem) -> float:
    """LHS(f) / RHS(f), with 0/0 = 0 and x/0 = inf for x > 0."""
    if not np.any(f.heights > 0):
        return 0.0
    ev = RatioEvaluator(problem, f.breakpoints)
    return exp_of(float(ev(_log_heights(f.heights)[None, :])[0]))


# -- search ------------------------------------------------------------------------

@dataclass
class SearchResult:
    value: float
    witness: StepFunction
    evaluations: int
    schedule: dict = field(default_factory=dict)

    def __iter__(self):
        yield self.value
        yield self.witness

    def to_dict(self):
        return {"value": to_json_value(self.value), "evaluations": self.evaluations,
                "witness": self.witness.to_dict(), "schedule": self.schedule}


class _Budget(Exception):
    pass


class _Search:
    """Evaluates candidate batches in a fixed order and tracks the best one."""

    def __init__(self, fn: Callable, n_pieces: int, budget: int):
        self.fn = fn
        self.n = n_pieces
        self.budget = budget
        self.used = 0
        self.best = -np.inf
        self.best_h = None

    def run(self, cands):
        """Log ratios of a candidate batch (log heights); raises _Budget when exhausted."""
        left = self.budget - self.used
        if left <= 0:
            raise _Budget
        truncated = cands.shape[0] > left
        cands = cands[:left]
        vals = np.empty(cands.shape[0])
        for k in range(0, cands.shape[0], BATCH):
            vals[k:k + BATCH] = self.fn(cands[k:k + BATCH])
        self.used += cands.shape[0]
        vals = np.where(np.isnan(vals), -np.inf, vals)
        i = int(np.argmax(vals))
        if vals[i] > self.best:
            self.best, self.best_h = float(vals[i]), cands[i].copy()
        if truncated:
            raise _Budget
        return vals

    def ascend(self, logh, groups):
        """Multiplicative coordinate ascent on the given piece groups."""
        cur = float(self.run(logh[None, :])[0])
        G = len(groups)
        for f in FACTORS:
            step = math.log(f)
            for _ in range(500):
                cands = np.repeat(logh[None, :], 2 * G, axis=0)
                for g, idx in enumerate(groups):
                    cands[2 * g, idx] += step
                    cands[2 * g + 1, idx] -= step
                vals = self.run(cands)
                j = int(np.argmax(vals))
                if not (vals[j] > cur + MIN_GAIN) or vals[j] == np.inf:
                    if vals[j] == np.inf:
                        cur = np.inf
                        logh = cands[j]
                    break
                cur, logh = float(vals[j]), cands[j]
            if cur == np.inf:
                break
        return logh, cur


def _search(fn, knots, budget, seed, n_chi=N_CHI):
    K = knots.size - 1
    if budget < MIN_BUDGET:
        raise ValueError(f"budget {budget} is below the minimum sweep of {MIN_BUDGET} evaluations")
    S = _Search(fn, K, budget)
    rng = np.random.default_rng(seed)
    ends = np.round(np.linspace(0, K, n_chi)).astype(int)
    chis = []
    for i in range(n_chi):
        for j in range(i + 1, n_chi):
            h = np.full(K, -np.inf)
            h[ends[i]:ends[j]] = 0.0
            chis.append(h)
    chis = np.array(chis)
    try:
        vals = S.run(chis)
        order = np.argsort(-vals, kind="stable")
        run = 0
        while True:
            if run == 0 or (run % 4 == 1 and (run // 4) < len(order)):
                # refine one of the best characteristic functions
                h = chis[order[(run // 4) if run else 0]].copy()
                L = LEVELS[-1]
            else:
                L = LEVELS[run % len(LEVELS)]
                h_level = rng.normal(0.0, 1.5, L)
                a, b = np.sort(rng.choice(L + 1, 2, replace=False))
                h_level[:a] = -np.inf
                h_level[b:] = -np.inf
                h = np.repeat(h_level, K // L) if K % L == 0 else np.interp(
                    np.arange(K), np.linspace(0, K, L), h_level)
            top = np.max(h[np.isfinite(h)]) if np.any(np.isfinite(h)) else 0.0
            h = np.where(np.isfinite(h), h, top + math.log(FLOOR))
            groups = np.array_split(np.arange(K), L)
            S.ascend(h, groups)
            run += 1
    except _Budget:
        pass
    logh = S.best_h if S.best_h is not None else np.zeros(K)   # every ratio was 0
    heights = np.exp(logh - np.max(logh)) if np.all(np.isfinite(logh)) else np.exp(logh)
    witness = StepFunction(knots, np.where(np.isfinite(heights), heights, 0.0)).compressed()
    schedule = {"knots": [to_json_value(float(knots[0])), to_json_value(float(knots[-1])), int(K)],
                "chi_grid": n_chi, "factors": list(FACTORS), "levels": list(LEVELS),
                "floor": FLOOR, "seed": int(seed), "budget": int(budget)}
    return SearchResult(exp_of(S.best), witness, S.used, schedule)


def default_knots(extra=(), n=N_PIECES, span=KNOT_RANGE):
    return np.geomspace(span[0], span[1], n + 1)


def best_constant_lower_bound(problem: ReducedProblem, budget: int = 4000, seed: int = 0,
                              knots=None) -> SearchResult:
    """Largest ratio found over the fixed search sequence, truncated at ``budget`` evaluations."""
    knots = default_knots() if knots is None else np.asarray(knots, dtype=float)
    return _search(RatioEvaluator(problem, knots), knots, budget, seed)


def triviality_probe(problem: ReducedProblem, spike_widths: Sequence[float] = (1e-1, 1e-2, 1e-3),
                     tau: float = 1.0) -> List[Tuple[float, float]]:
    """Ratios on unit-mass spikes ``chi_(tau, tau + d) / d`` for decreasing widths ``d``."""
    p = problem.params.floats[0]
    if not p > 1:
        raise UnsupportedRegimeError(f"the triviality probe applies to p > 1 only, got p = {p}")
    for name, wt in (("u", problem.u), ("w", problem.w)):
        s = wt.tail(tau)
        if not 0 < s < INF:
            raise AdmissibilityError(f"int_t^inf {name} must be positive and finite at t = {tau}", t=tau)
    out = []
    for d in spike_widths:
        f = StepFunction([tau, tau + d], [1.0 / d])
        out.append((float(d), ratio(f, problem)))
    return out


# -- oracles for the building-block constants -----------------------------------

class GridRatio:
    """Batched log ratios for the H, R and I quotients on a fine trapezoid grid."""

    KINDS = ("H", "Hsup", "R", "I", "Isup")

    def __init__(self, kind, p, q, v, w, u=None, m=None, knots=None, n=3000):
        if kind not in self.KINDS:
            raise ValueError(f"unknown quotient {kind!r}")
        if kind in ("I", "Isup") and u is None:
            raise ValueError("iterated quotients need u")
        self.kind = kind
        self.p, self.q = float(p), float(q)
        self.m = None if m is None else float(m)
        knots = default_knots() if knots is None else knots
        self.knots = knots
        lo, hi = knots[0] * 1e-3, knots[-1] * 1e3
        g = np.unique(np.concatenate([np.geomspace(lo, hi, n), knots]))
        self.g = g
        self.dg = np.diff(g)
        self.piece = np.clip(np.searchsorted(knots, g, side="right") - 1, -1, knots.size - 1)
        self.lw = w.log_value(g)
        self.W0 = math.log(max(w.integrate(0.0, lo), 1e-300))
        self.lu = None if u is None else u.log_value(g)
        self.U0 = None if u is None else math.log(max(u.integrate(0.0, lo), 1e-300))
        pts = np.unique(np.concatenate([make_points([v], 1e-10, 1e10, 8), knots]))
        tv = v.table(pts)
        self.logV = log_span(*tv.cumulative(knots[:-1]), *tv.cumulative(knots[1:]))
        # the R denominator is an outer Cesaro norm; the piecewise-exact evaluator resolves fast decay
        self.hardy_norm = NormEvaluator(knots, 1.0, q, wm.constant(1.0), w) if kind == "R" else None

    def _lp_norm(self, logh):
        with np.errstate(invalid="ignore"):
            x = self.p * logh + self.logV[None, :]
        return llse(np.where(np.isnan(x), -np.inf, x), axis=1) / self.p

    def _copson(self, h):
        """``int_t^inf f`` at the grid points for heights ``h`` (B, K), linear scale."""
        k = self.knots
        d = np.diff(k)
        full = h * d[None, :]
        after = np.concatenate([np.cumsum(full[:, ::-1], axis=1)[:, ::-1][:, 1:],
                                np.zeros((h.shape[0], 1))], axis=1)
        j = self.piece
        inside = (j >= 0) & (j < k.size - 1)
        jj = np.clip(j, 0, k.size - 2)
        val = h[:, jj] * (k[jj + 1] - self.g)[None, :] + after[:, jj]
        total = full.sum(axis=1, keepdims=True)
        return np.where(inside[None, :], val, np.where(j[None, :] < 0, total, 0.0))

    def _hardy(self, h):
        """``int_0^t f`` at the grid points."""
        k = self.knots
        d = np.diff(k)
        full = h * d[None, :]
        before = np.concatenate([np.zeros((h.shape[0], 1)), np.cumsum(full, axis=1)[:, :-1]], axis=1)
        j = self.piece
        inside = (j >= 0) & (j < k.size - 1)
        jj = np.clip(j, 0, k.size - 2)
        val = before[:, jj] + h[:, jj] * (self.g - k[jj])[None, :]
        total = full.sum(axis=1, keepdims=True)
        return np.where(inside[None, :], val, np.where(j[None, :] < 0, 0.0, total))

    def _trap(self, logf):
        """log of the trapezoid integral of exp(logf) over the grid (rows)."""
        with np.errstate(invalid="ignore"):
            pair = np.logaddexp(logf[:, 1:], logf[:, :-1]) - math.log(2.0) + np.log(self.dg)[None, :]
        return llse(np.where(np.isnan(pair), -np.inf, pair), axis=1)

    def __call__(self, logh):
        logh = np.atleast_2d(logh)
        top = np.max(logh, axis=1, keepdims=True)
        logh = logh - np.where(np.isfinite(top), top, 0.0)   # both sides are 1-homogeneous
        h = np.exp(logh)
        q = self.q
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "H":
                F = np.log(self._copson(h))
                num = np.logaddexp(self._trap(q * F + self.lw[None, :]), q * F[:, 0] + self.W0) / q
                den = self._lp_norm(logh)
            elif self.kind == "R":
                num = self._lp_norm(logh)
                den = self.hardy_norm.log_norm(logh)
            elif self.kind == "I":
                m = self.m
                F = np.log(self._copson(h))
                gl = m * F + self.lu[None, :]
                pair = np.logaddexp(gl[:, 1:], gl[:, :-1]) - math.log(2.0) + np.log(self.dg)[None, :]
                pair = np.where(np.isnan(pair), -np.inf, pair)
                G = np.concatenate([np.logaddexp.accumulate(pair[:, ::-1], axis=1)[:, ::-1],
                                    np.full((h.shape[0], 1), -np.inf)], axis=1)
                num = np.logaddexp(self._trap((q / m) * G + self.lw[None, :]),
                                   (q / m) * G[:, 0] + self.W0) / q
                den = self._lp_norm(logh)
            elif self.kind == "Hsup":
                F = np.log(self._copson(h))
                num = np.max(self.lw[None, :] + F, axis=1)
                den = self._lp_norm(logh)
            else:  # "Isup"
                F = np.log(self._copson(h))
                S = np.maximum.accumulate((self.lu[None, :] + F)[:, ::-1], axis=1)[:, ::-1]
                num = np.logaddexp(self._trap(q * S + self.lw[None, :]), q * S[:, 0] + self.W0) / q
                den = self._lp_norm(logh)
            out = num - den
        out = np.where(num == -np.inf, -np.inf, out)
        return np.where(np.isnan(out), -np.inf, out)


def reference_lower_bound(kind: str, p, q, v, w, u=None, m=None, budget: int = 2000,
                          seed: int = 0) -> SearchResult:
    """Search lower bound for the H ("H", "Hsup"), R ("R") and I ("I", "Isup") quotients.

    H and I quotients take ``f^p v`` in the denominator and the Copson operator
    ``int_t^inf f`` in the numerator; R is the reverse Hardy quotient.
    """
    knots = default_knots(n=64)
    fn = GridRatio(kind, p, q, v, w, u=u, m=m, knots=knots)
    return _search(fn, knots, budget, seed)
