"""Exact and union-bound symbol error probabilities on the AWGN channel.

Each generic family has two equivalent expressions.  The ``naive`` form is
``1 - P(correct)`` and loses all accuracy once the SEP drops below double
precision resolution near 1.  The ``stable`` form integrates the error event
directly and is evaluated in log space, so it stays accurate far below the
double underflow threshold; ``SepValue.log_p`` carries the value there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from polysep import geometry
from polysep.quadrature import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    integrate,
    integrate_gaussian_centered,
    integrate_log_gaussian,
)
from polysep.specfun import INV_SQRT_2PI, log1m_q, log_q, q

Form = Literal["naive", "stable"]
METHODS = ("naive_exact", "stable_exact", "union_bound", "monte_carlo")

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
SQRT_32_OVER_PI = math.sqrt(32.0 / math.pi)
LOG_INV_SQRT_2PI = math.log(INV_SQRT_2PI)


class NoExactFormula(ValueError):
    """No exact SEP expression exists for the requested constellation."""


@dataclass(frozen=True)
class SnrPoint:
    """Signal-to-noise ratio Es/N0, stored linear."""

    gamma: float

    def __post_init__(self):
        if not (self.gamma >= 0.0):
            raise ValueError(f"SNR must be non-negative, got {self.gamma}")

    @classmethod
    def from_db(cls, gamma_db: float) -> "SnrPoint":
        return cls(10.0 ** (gamma_db / 10.0))

    @classmethod
    def from_gamma_b_db(cls, gamma_b_db: float, m: int) -> "SnrPoint":
        """Es/N0 for a bit SNR Eb/N0 in dB, with Eb = Es/log2(M)."""
        return cls(10.0 ** (gamma_b_db / 10.0) * math.log2(m))

    @property
    def gamma_db(self) -> float:
        return 10.0 * math.log10(self.gamma) if self.gamma > 0 else -math.inf

    def gamma_b(self, m: int) -> float:
        return self.gamma / math.log2(m)

    def gamma_b_db(self, m: int) -> float:
        return 10.0 * math.log10(self.gamma_b(m)) if self.gamma > 0 else -math.inf


def as_snr(gamma) -> SnrPoint:
    return gamma if isinstance(gamma, SnrPoint) else SnrPoint(float(gamma))


@dataclass(frozen=True)
class SepValue:
    """A symbol error probability.

    ``p`` is always in [0, 1].  ``log_p`` is the natural log of the method's
    unclamped value and stays finite where ``p`` underflows.  For the union
    bound ``raw`` is the unclamped bound, which may exceed 1.  ``err`` is the
    absolute error estimate (quadrature) or 0 for closed forms.
    """

    p: float
    method: str
    err: float = 0.0
    log_p: float = -math.inf
    raw: float | None = None

    @classmethod
    def from_log(cls, log_p: float, method: str, rel_err: float = 0.0,
                 clamp: bool = True) -> "SepValue":
        raw = math.exp(min(log_p, 700.0))
        p = min(raw, 1.0) if clamp else raw
        return cls(p, method, abs(p * rel_err), log_p, raw)

    @classmethod
    def from_value(cls, value: float, method: str, err: float = 0.0) -> "SepValue":
        p = min(max(value, 0.0), 1.0)
        log_p = math.log(p) if p > 0.0 else -math.inf
        return cls(p, method, err, log_p, value)

    @property
    def log10_p(self) -> float:
        return self.log_p / math.log(10.0)


def _check_form(form: str) -> None:
    if form not in ("naive", "stable"):
        raise ValueError(f"form must be 'naive' or 'stable', got {form!r}")


def _neumaier(terms) -> np.ndarray:
    """Compensated sum over the first axis, elementwise over the rest."""
    total = np.zeros_like(terms[0], dtype=float)
    comp = np.zeros_like(total)
    for t in terms:
        s = total + t
        big = np.abs(total) >= np.abs(t)
        comp += np.where(big, (total - s) + t, (t - s) + total)
        total = s
    return total + comp


def _binomial_tail_sum(n: int, x) -> np.ndarray:
    """sum_{i=0}^{n-1} C(n, i+1) x^i, compensated, elementwise in ``x``."""
    x = np.asarray(x, dtype=float)
    terms = [math.comb(n, i + 1) * x ** i for i in range(n)]
    return _neumaier(terms)


def _logaddexp(a: float, b: float) -> float:
    return float(np.logaddexp(a, b))


# -- n-cube ------------------------------------------------------------------

def sep_cube(n: int, gamma, form: Form = "stable") -> SepValue:
    """SEP of the n-cube, i.e. n independent BPSK channels."""
    _check_form(form)
    if n < 1:
        raise ValueError("n must be >= 1")
    g = as_snr(gamma).gamma
    x = math.sqrt(2.0 * g / n)
    if form == "naive":
        return SepValue.from_value(1.0 - (1.0 - q(x)) ** n, "naive_exact")
    qx = q(x)
    s = float(_binomial_tail_sum(n, -qx))
    return SepValue.from_log(log_q(x) + math.log(s), "stable_exact")


# -- n-crosspolytope ---------------------------------------------------------

def sep_crosspolytope(n: int, gamma, form: Form = "stable",
                      rel_tol: float = DEFAULT_REL_TOL,
                      abs_tol: float = DEFAULT_ABS_TOL) -> SepValue:
    """SEP of the n-crosspolytope (biorthogonal signalling)."""
    _check_form(form)
    if n < 2:
        raise ValueError("n must be >= 2")
    g = as_snr(gamma).gamma
    c = math.sqrt(2.0 * g)
    if form == "naive":
        res = integrate_gaussian_centered(
            lambda x: (1.0 - 2.0 * q(x)) ** (n - 1), c, (0.0, math.inf),
            rel_tol, abs_tol, vectorized=True)
        return SepValue.from_value(1.0 - INV_SQRT_2PI * res.value, "naive_exact",
                                   INV_SQRT_2PI * res.abs_error_estimate)

    def log_h(x):
        return log_q(x) + np.log(_binomial_tail_sum(n - 1, -2.0 * q(x)))

    res = integrate_log_gaussian(log_h, c, (0.0, math.inf), math.log(n - 1), rel_tol)
    log_p = _logaddexp(log_q(c), math.log(SQRT_2_OVER_PI) + res.log_value)
    return SepValue.from_log(log_p, "stable_exact", res.rel_error_estimate)


# -- n-simplex -----------------------------------------------------------------

def sep_simplex(n: int, gamma, form: Form = "stable",
                rel_tol: float = DEFAULT_REL_TOL,
                abs_tol: float = DEFAULT_ABS_TOL) -> SepValue:
    """SEP of the regular n-simplex (transorthogonal signalling)."""
    _check_form(form)
    if n < 1:
        raise ValueError("n must be >= 1")
    g = as_snr(gamma).gamma
    c = math.sqrt(2.0 * g * (n + 1) / n)
    if form == "naive":
        res = integrate_gaussian_centered(
            lambda x: (1.0 - q(x)) ** n, c, (-math.inf, math.inf),
            rel_tol, abs_tol, vectorized=True)
        return SepValue.from_value(1.0 - INV_SQRT_2PI * res.value, "naive_exact",
                                   INV_SQRT_2PI * res.abs_error_estimate)

    def log_h(x):
        return log_q(x) + np.log(_binomial_tail_sum(n, -q(x)))

    res = integrate_log_gaussian(log_h, c, (-math.inf, math.inf), math.log(n), rel_tol)
    return SepValue.from_log(LOG_INV_SQRT_2PI + res.log_value, "stable_exact",
                             res.rel_error_estimate)


# -- M-PSK -------------------------------------------------------------------

def sep_mpsk(m: int, gamma, rel_tol: float = DEFAULT_REL_TOL) -> SepValue:
    """SEP of M-PSK from Craig's finite-range integral.

    The integrand exp(-g sin^2(pi/M) / sin^2 z) peaks at z = pi/2 with value
    exp(-g sin^2(pi/M)); that factor is pulled out so the remaining integrand
    exp(-g sin^2(pi/M) cot^2 z) is O(1).  M = 2 reproduces Q(sqrt(2 g)).
    """
    if m < 2:
        raise ValueError("M must be >= 2")
    g = as_snr(gamma).gamma
    a = g * math.sin(math.pi / m) ** 2
    upper = math.pi - math.pi / m

    def h(z):
        cot = np.cos(z) / np.sin(z)
        return np.exp(-a * cot * cot)

    breaks = [math.pi / 2.0] if math.pi / 2.0 < upper else []
    if a > 0.0:
        # width of the peak around pi/2 is about 1/sqrt(2a)
        w = 1.0 / math.sqrt(2.0 * a)
        breaks += [math.pi / 2.0 - k * w for k in (4.0, 12.0) if k * w < math.pi / 2.0]
        breaks += [math.pi / 2.0 + k * w for k in (4.0, 12.0) if math.pi / 2.0 + k * w < upper]
        # near z = 0 the integrand rises from 0 to 1 over a layer of width
        # sqrt(a), then its deficit decays like a/z^2: split geometrically
        r = 0.5 * math.sqrt(a)
        while r < 0.25:
            breaks.append(r)
            r *= 4.0
    res = integrate(h, (0.0, upper), rel_tol, 1e-300, points=breaks, vectorized=True)
    log_p = -a + math.log(res.value / math.pi)
    return SepValue.from_log(log_p, "stable_exact", res.rel_error_estimate)


# -- 24-cell -------------------------------------------------------------------

def sep_24cell(gamma, form: Form = "stable",
               rel_tol: float = DEFAULT_REL_TOL,
               abs_tol: float = DEFAULT_ABS_TOL) -> SepValue:
    """SEP of the 24-cell."""
    _check_form(form)
    g = as_snr(gamma).gamma
    s = math.sqrt(g)
    if form == "naive":
        res = integrate_gaussian_centered(
            lambda x: (1.0 - 2.0 * q(x)) ** 2 * q(x - s), s, (0.0, math.inf),
            rel_tol, abs_tol, vectorized=True)
        return SepValue.from_value(1.0 - SQRT_2_OVER_PI * res.value, "naive_exact",
                                   SQRT_2_OVER_PI * res.abs_error_estimate)

    def log_h(x):
        return log_q(x) + log1m_q(x) + log_q(x - s)

    res = integrate_log_gaussian(log_h, s, (0.0, math.inf), 0.0, rel_tol)
    head = log_q(s) + math.log(2.0 - q(s))
    log_p = _logaddexp(head, math.log(SQRT_32_OVER_PI) + res.log_value)
    return SepValue.from_log(log_p, "stable_exact", res.rel_error_estimate)


# -- union bound and routing ---------------------------------------------------

def union_bound(a: int, d_over_sqrt_es: float, gamma) -> SepValue:
    """A * Q(sqrt(d^2 g / (2 Es))); ``p`` is clamped to 1, ``raw`` is not."""
    if a < 1 or d_over_sqrt_es <= 0:
        raise ValueError("need A >= 1 and d > 0")
    g = as_snr(gamma).gamma
    x = math.sqrt(d_over_sqrt_es ** 2 * g / 2.0)
    return SepValue.from_log(math.log(a) + log_q(x), "union_bound")


def _size(kind, n, m):
    if kind == "polygon":
        if m is None:
            raise ValueError("polygon needs m")
        return m
    if kind in geometry.DIMENSIONED:
        if n is None:
            raise ValueError(f"{kind} needs n")
        return n
    return None


def sep_dispatch(kind: str, gamma, method: str = "stable_exact", *,
                 n: int | None = None, m: int | None = None,
                 trials: int = 1_000_000, seed: int = 0, workers: int = 1,
                 rel_tol: float = DEFAULT_REL_TOL) -> SepValue:
    """Evaluate the SEP of an RCP kind by the requested method.

    Exact methods exist for polygons, cubes, crosspolytopes, simplices and the
    24-cell; the icosahedron, dodecahedron, 600-cell and 120-cell only have the
    union bound (and Monte Carlo, except for the 120-cell, whose vertices are
    not generated).
    """
    kind = geometry.canonical_kind(kind)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    size = _size(kind, n, m)
    if method in ("naive_exact", "stable_exact"):
        form = "naive" if method == "naive_exact" else "stable"
        if kind not in geometry.EXACT_KINDS:
            raise NoExactFormula(f"no exact SEP expression is known for the {kind}")
        if kind == "polygon":
            res = sep_mpsk(size, gamma, rel_tol)
            return SepValue(res.p, method, res.err, res.log_p, res.raw)
        if kind == "cube":
            return sep_cube(size, gamma, form)
        if kind == "crosspolytope":
            return sep_crosspolytope(size, gamma, form, rel_tol)
        if kind == "simplex":
            return sep_simplex(size, gamma, form, rel_tol)
        return sep_24cell(gamma, form, rel_tol)
    if method == "union_bound":
        row = geometry.table_params(kind, n=n, m=m)
        return union_bound(row.A, row.d_over_sqrt_es, gamma)

    from polysep.montecarlo import simulate_sep

    const = geometry.generate(kind, n=n, m=m)
    est = simulate_sep(const, gamma, trials, seed, workers=workers)
    return SepValue.from_value(est.p_hat, "monte_carlo", est.ci95_halfwidth)
