"""Extended nonnegative reals carried in the log domain.

Every nonnegative quantity in this package is stored as its natural log, so
that 0 is ``-inf`` and +infinity is ``+inf``.  The helpers below apply the
conventions ``0/0 = 0``, ``0 * inf = 0`` and ``1/inf = 0`` to log values.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

INF = math.inf


def lmul(*logs):
    """Log of a product; a 0 factor wins over an infinite one."""
    out = np.asarray(logs[0], dtype=float)
    for x in logs[1:]:
        out = out + x
    return np.where(np.isnan(out), -np.inf, out) if np.ndim(out) else (
        -np.inf if np.isnan(out) else float(out))


def lpow(logx, e):
    """Log of ``x**e`` with ``x**0 == 1`` for every x, including 0 and inf."""
    out = np.multiply(e, logx)
    return np.where(np.isnan(out), 0.0, out) if np.ndim(out) else (
        0.0 if np.isnan(out) else float(out))


def ldiv(loga, logb):
    """Log of ``a / b`` with ``0/0 = 0``."""
    out = np.subtract(loga, logb)
    return np.where(np.isnan(out), -np.inf, out) if np.ndim(out) else (
        -np.inf if np.isnan(out) else float(out))


def lsub(loga, logb):
    """Log of ``a - b`` for ``a >= b``; returns -inf where ``a <= b``."""
    loga = np.asarray(loga, dtype=float)
    logb = np.asarray(logb, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        d = logb - loga
        out = loga + np.log(-np.expm1(np.minimum(d, 0.0)))
    out = np.where((d >= 0) | (loga == -np.inf) | np.isnan(d), -np.inf, out)
    out = np.where(loga == np.inf, np.inf, out)
    return out if out.ndim else float(out)


def lsum(*logs):
    """Log of a sum of nonnegative terms given as logs."""
    return np.logaddexp.reduce(np.broadcast_arrays(*logs), axis=0)


def llse(a, axis=None, b=None):
    """``logsumexp`` that tolerates +inf and all -inf inputs."""
    a = np.asarray(a, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        out = logsumexp(a, axis=axis, b=b)
    if axis is None:
        if np.any(a == np.inf):
            return np.inf
        return float(out) if not np.isnan(out) else -np.inf
    out = np.where(np.any(a == np.inf, axis=axis), np.inf, out)
    return np.where(np.isnan(out), -np.inf, out)


def log_of(x):
    """Natural log of a nonnegative extended value (0 -> -inf)."""
    with np.errstate(divide="ignore"):
        return np.log(x)


def exp_of(logx):
    with np.errstate(over="ignore"):
        return np.exp(logx)


def to_json_value(x: float):
    """Infinity is written as the string ``"inf"``; NaN never leaves the package."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def from_json_value(x) -> float:
    if isinstance(x, str):
        return float(x)
    if x is None:
        return INF
    return float(x)
