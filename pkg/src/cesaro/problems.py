"""Fixture problems for every theorem regime and a seeded random problem generator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as Fr
from typing import Dict, List

import numpy as np

from . import weights as wm
from .embedding import FORMULAS, Parameters, ReducedProblem, classify_regime, embedding_constant
from .errors import AdmissibilityError, DegenerateWeightError

# one parameter triple well inside each regime
REGIME_PARAMS: Dict[str, tuple] = {
    "T1a": (Fr(1, 2), Fr(1), Fr(1, 2)),
    "T1b": (Fr(1, 2), Fr(3, 4), Fr(1, 2)),
    "T2": (Fr(1), Fr(2), Fr(1)),
    "T3a": (Fr(1, 2), Fr(2), Fr(3, 2)),
    "T3b": (Fr(1, 2), Fr(3, 2), Fr(2)),
    "T3c": (Fr(1, 2), Fr(3, 4), Fr(2, 3)),
    "T3d": (Fr(1, 2), Fr(3, 4), Fr(2)),
    "T4a": (Fr(1), Fr(3), Fr(2)),
    "T4b": (Fr(1), Fr(3, 2), Fr(3)),
}


def fixture(tag: str) -> ReducedProblem:
    """A fixed, admissible problem in regime ``tag``.

    T1a is the problem with A_1 = 1/4 and T2 the one with A_3 = 1; the rest
    use u = e^{-t}, v = 1, w = (1+t)^{-2}.
    """
    P = Parameters(*REGIME_PARAMS[tag])
    if tag == "T1a":
        return ReducedProblem(P, wm.analytic(2, 0, -3), wm.constant(1), wm.analytic(Fr(1, 2), 0, Fr(-3, 2)))
    if tag == "T2":
        e = wm.analytic(1, 0, 0, -1)
        return ReducedProblem(P, wm.analytic(2, 0, -3), e, e)
    return ReducedProblem(P, wm.analytic(1, 0, 0, -1), wm.constant(1), wm.analytic(1, 0, -2))


def triviality_fixture() -> ReducedProblem:
    """p = 2, q = 2, theta = 1 with u = w = e^{-t} and v = 1."""
    e = wm.analytic(1, 0, 0, -1)
    return ReducedProblem(Parameters(2, 2, 1), e, wm.constant(1), e)


# -- random problems -------------------------------------------------------------

def _frac(x, den=12):
    return Fr(x).limit_denominator(den)


def random_params(tag: str, rng: np.random.Generator, margin=Fr(1, 12)) -> Parameters:
    """Rational triple in the interior of ``tag``, at least ``margin`` from every boundary."""
    m = margin
    for _ in range(1000):
        p = _frac(rng.uniform(0.2, 0.9))
        q = _frac(rng.uniform(0.2, 3.5))
        th = _frac(rng.uniform(0.2, 3.5))
        if tag in ("T2", "T4a", "T4b"):
            p = Fr(1)
        if tag.startswith("T1"):
            th = _frac(rng.uniform(0.15, float(p)))
        P = Parameters(p, q, th)
        if classify_regime(P).tag != tag:
            continue
        gaps = [abs(q - p), abs(q - 1), abs(th - q)]
        if p < 1:
            gaps += [1 - p]
        if tag.startswith("T3"):
            gaps += [th - p, abs(th - 1)]
        if tag.startswith("T4") or tag == "T2":
            gaps += [abs(th - 1)] if tag != "T2" else []
        if min(gaps) >= m:
            return P
    raise RuntimeError(f"no parameters found for {tag}")


def _family(rng, c_range, a_range, b_range, g_prob=0.5, g_range=(0.2, 2.0)):
    c = float(np.exp(rng.uniform(*np.log(c_range))))
    a = _frac(rng.uniform(*a_range), 8)
    b = _frac(rng.uniform(*b_range), 8)
    g = -_frac(rng.uniform(*g_range), 8) if rng.uniform() < g_prob else Fr(0)
    return wm.analytic(c, a, b, g)


def random_weights(rng):
    """``c t^a (1+t)^b e^{-g t}`` weights with exponents in ranges that usually give finite constants."""
    u = _family(rng, (0.2, 5.0), (-0.4, 1.0), (-4.0, -1.5))
    v = _family(rng, (0.2, 5.0), (-0.3, 0.3), (-0.3, 0.3), g_prob=0.0)
    w = _family(rng, (0.2, 5.0), (-0.4, 1.0), (-4.0, -1.5))
    return u, v, w


@dataclass
class RandomProblem:
    tag: str
    index: int
    seed: int
    problem: ReducedProblem
    rejected: int
    constant: float


def random_problems(tag: str, n: int = 20, seed: int = 0, max_tries: int = 400,
                    per_decade: int = 12) -> List[RandomProblem]:
    """``n`` admissible problems in regime ``tag`` with finite combined constant.

    Candidates are drawn from a generator seeded with ``(seed, tag)``; only
    inadmissible problems and problems with an infinite constant are rejected.
    ``constant`` is evaluated on a grid with ``per_decade`` points per decade.
    """
    key = sum(ord(ch) * 131 ** i for i, ch in enumerate(tag)) % (2 ** 31)
    rng = np.random.default_rng([seed, key])
    out = []
    tries = rejected = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"too many rejections in {tag}")
        P = random_params(tag, rng)
        u, v, w = random_weights(rng)
        pr = ReducedProblem(P, u, v, w)
        try:
            rep = embedding_constant(pr, per_decade=per_decade, lazy=True)
            if not rep.admissibility.passed:
                rejected += 1
                continue
            T = rep.combined
        except (AdmissibilityError, DegenerateWeightError):
            rejected += 1
            continue
        if not math.isfinite(T) or T <= 0:
            rejected += 1
            continue
        out.append(RandomProblem(tag, len(out), seed, pr, rejected, T))
    return out


def theorem_tags():
    return list(FORMULAS)
