"""Power and spectral efficiency, and the crosspolytope/simplex gain gap."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize


def db(x: float) -> float:
    return 10.0 * math.log10(x)


def power_efficiency(d_over_sqrt_es: float, m: int) -> float:
    """Asymptotic gain over BPSK, d^2/(4 Eb) with Eb = Es/log2(M).  Linear."""
    if d_over_sqrt_es <= 0:
        raise ValueError("minimum distance must be positive")
    if m < 2:
        raise ValueError("need at least two points")
    return d_over_sqrt_es ** 2 * math.log2(m) / 4.0


def spectral_efficiency(m: int, n: int) -> float:
    """Bits per real dimension, log2(M)/n."""
    if m < 2 or n < 1:
        raise ValueError("need M >= 2 and n >= 1")
    return math.log2(m) / n


@dataclass(frozen=True)
class EfficiencyReport:
    G_b_linear: float
    G_b_dB: float
    S: float


def efficiency_report(d_over_sqrt_es: float, m: int, n: int) -> EfficiencyReport:
    g = power_efficiency(d_over_sqrt_es, m)
    return EfficiencyReport(g, db(g), spectral_efficiency(m, n))


def cp_simplex_gap(n: float) -> float:
    """Power-efficiency ratio of the n-crosspolytope over the n-simplex (linear).

    ``n`` may be real; the ratio is n log2(2n) / ((n+1) log2(n+1)).
    """
    if n < 2:
        raise ValueError("gap is defined for n >= 2")
    return n * math.log2(2.0 * n) / ((n + 1.0) * math.log2(n + 1.0))


def cp_simplex_gap_db(n: float) -> float:
    return db(cp_simplex_gap(n))


@dataclass(frozen=True)
class GapMaximum:
    n_int: int
    n_real: float
    gap_dB: float
    at_boundary: bool = False

    def __iter__(self):
        return iter((self.n_int, self.n_real, self.gap_dB))


def _log_gap_slope(n: float) -> float:
    # d/dn of ln(cp_simplex_gap)
    return (1.0 / n + 1.0 / (n * math.log(2.0 * n))
            - 1.0 / (n + 1.0) - 1.0 / ((n + 1.0) * math.log(n + 1.0)))


def gap_maximizer(n_max: int = 1000) -> GapMaximum:
    """Integer and real maximizers of the crosspolytope/simplex gap on [2, n_max].

    The peak is flat, so a direct search on the ratio only pins n to about
    sqrt(machine epsilon); the real maximizer is instead taken as the root of
    the log-derivative, bracketed in [20, 30] and clipped to ``n_max``.  When
    ``n_max`` cuts off the interior peak the maximizer sits on the boundary
    and ``at_boundary`` is set.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    n_int = max(range(2, n_max + 1), key=cp_simplex_gap)
    lo, hi = min(20.0, float(n_max)), min(30.0, float(n_max))
    if lo < hi and _log_gap_slope(lo) > 0.0 > _log_gap_slope(hi):
        n_real = optimize.brentq(_log_gap_slope, lo, hi, xtol=1e-12)
    else:
        n_real = float(n_max) if _log_gap_slope(hi) > 0.0 else 2.0
    at_boundary = n_int == n_max or n_real >= n_max
    return GapMaximum(n_int, n_real, cp_simplex_gap_db(n_int), at_boundary)
