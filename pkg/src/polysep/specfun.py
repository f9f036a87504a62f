"""Gaussian density and tail function.

All functions accept scalars or numpy arrays and return the same shape;
scalar input gives a Python float.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
LN_HALF = math.log(0.5)

# Above this argument log_q uses the scaled complementary error function.
LOG_Q_SWITCH = 8.0


def _out(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


def gauss_pdf(x):
    """Standard normal density f(x) = exp(-x^2/2)/sqrt(2 pi)."""
    x = np.asarray(x, dtype=float)
    return _out(INV_SQRT_2PI * np.exp(-0.5 * x * x))


def q(x):
    """Gaussian tail probability Q(x) = P(Z >= x)."""
    x = np.asarray(x, dtype=float)
    return _out(np.clip(0.5 * special.erfc(x / SQRT2), 0.0, 1.0))


def log_q(x):
    """Natural log of Q(x), finite for arguments far beyond double underflow.

    For ``x >= 8`` the tail is written as ``Q(x) = erfcx(x/sqrt2)/2 * exp(-x^2/2)``
    so that the log never passes through an underflowed intermediate.
    """
    x = np.asarray(x, dtype=float)
    small = x < LOG_Q_SWITCH
    xs = np.where(small, x, 0.0)
    with np.errstate(divide="ignore"):
        direct = np.log(0.5 * special.erfc(xs / SQRT2))
    # left of zero Q is near one; log1p keeps the small deficit
    left = np.log1p(-0.5 * special.erfc(-np.minimum(xs, 0.0) / SQRT2))
    direct = np.where(xs < 0.0, left, direct)
    xl = np.where(small, LOG_Q_SWITCH, x)
    scaled = np.log(0.5 * special.erfcx(xl / SQRT2)) - 0.5 * xl * xl
    return _out(np.where(small, direct, scaled))


def log1m_q(x):
    """log(1 - Q(x)) = log Q(-x), accurate on both tails."""
    return log_q(-np.asarray(x, dtype=float))
