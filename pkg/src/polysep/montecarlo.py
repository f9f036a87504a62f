"""Seeded Monte Carlo estimation of the SEP with ML detection.

Noise comes from numpy's counter-based Philox4x64 generator keyed by
``(seed, stream)``.  Trial ``i`` consumes uniforms ``i*n ... i*n + n - 1`` of
its stream, turned into normals by the inverse CDF, so every trial's noise is
a pure function of ``(seed, i)``: chunking and worker count change nothing.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from polysep.analytic import as_snr
from polysep.geometry import Constellation, ml_detect_batch, voronoi_member_24cell

DEFAULT_CHUNK = 1 << 17
NOISE_STREAM = 0
SYMBOL_STREAM = 1
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class McEstimate:
    trials: int
    errors: int
    seed: int

    @property
    def p_hat(self) -> float:
        return self.errors / self.trials

    @property
    def ci95_halfwidth(self) -> float:
        """Normal-approximation half-width 1.96 sqrt(p(1-p)/N)."""
        p = self.p_hat
        return 1.96 * math.sqrt(p * (1.0 - p) / self.trials)

    def wilson(self, level: float = 0.95) -> tuple[float, float]:
        return confidence_interval(self.errors, self.trials, level)

    def wilson_halfwidth(self, level: float = 0.95) -> float:
        lo, hi = self.wilson(level)
        return 0.5 * (hi - lo)


def confidence_interval(errors: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= errors <= trials:
        raise ValueError("need 0 <= errors <= trials and trials >= 1")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    z = statistics.NormalDist().inv_cdf(0.5 + level / 2.0)
    z2 = z * z
    p = errors / trials
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, center - half)
    hi = 1.0 if errors == trials else min(1.0, center + half)
    return lo, hi


def _uniforms(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Uniforms in (0, 1) number ``start .. start+count-1`` of a stream."""
    key = np.array([seed & _MASK64, stream], dtype=np.uint64)
    bitgen = np.random.Philox(key=key)
    # each Philox4x64 counter step yields four 64-bit words
    bitgen.advance(start // 4)
    skip = start % 4
    raw = bitgen.random_raw(skip + count)[skip:]
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def standard_normals(seed: int, start_trial: int, trials: int, dim: int) -> np.ndarray:
    """Noise vectors for trials ``start_trial .. start_trial+trials-1``, shape (trials, dim)."""
    u = _uniforms(seed, NOISE_STREAM, start_trial * dim, trials * dim)
    return special.ndtri(u).reshape(trials, dim)


def transmit_indices(seed: int, start_trial: int, trials: int, m: int) -> np.ndarray:
    u = _uniforms(seed, SYMBOL_STREAM, start_trial, trials)
    return np.minimum((u * m).astype(np.int64), m - 1)


def _chunks(trials: int, chunk_size: int):
    return [(s, min(chunk_size, trials - s)) for s in range(0, trials, chunk_size)]


def _run(fn, trials, chunk_size, workers):
    jobs = _chunks(trials, chunk_size)
    if workers <= 1 or len(jobs) == 1:
        return sum(fn(s, k) for s, k in jobs)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(lambda job: fn(*job), jobs))


def simulate_sep(c: Constellation, gamma, trials: int, seed: int, *,
                 chunk_size: int = DEFAULT_CHUNK, workers: int = 1,
                 uniform_symbols: bool = False) -> McEstimate:
    """Estimate the SEP of ``c`` at ``gamma`` = Es/N0 over ``trials`` symbols.

    By vertex transitivity the transmitted symbol is fixed to index 0 unless
    ``uniform_symbols`` is set, in which case it is drawn from a separate
    stream so the noise sequence is the same either way.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    g = as_snr(gamma).gamma
    if g <= 0.0:
        raise ValueError("Monte Carlo needs gamma > 0")
    points = c.points
    m, n = points.shape
    sigma = math.sqrt(c.symbol_energy / (2.0 * g))

    def chunk(start, count):
        z = standard_normals(seed, start, count, n)
        if uniform_symbols:
            tx = transmit_indices(seed, start, count, m)
            y = points[tx] + sigma * z
            return int(np.count_nonzero(ml_detect_batch(y, points) != tx))
        y = points[0] + sigma * z
        return int(np.count_nonzero(ml_detect_batch(y, points) != 0))

    errors = _run(chunk, trials, chunk_size, workers)
    return McEstimate(trials, errors, seed)


def simulate_24cell_region(gamma, trials: int, seed: int, *,
                           chunk_size: int = DEFAULT_CHUNK,
                           workers: int = 1) -> McEstimate:
    """Estimate the 24-cell SEP from its closed-form decision region.

    Works in the unnormalized frame: (1, 1, 0, 0) plus Z/sqrt(gamma), with an
    error whenever the received point leaves min(y1, y2) >= max(|y3|, |y4|).
    Uses the same noise stream as :func:`simulate_sep`, so the two agree
    trial by trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    g = as_snr(gamma).gamma
    if g <= 0.0:
        raise ValueError("Monte Carlo needs gamma > 0")
    x1 = np.array([1.0, 1.0, 0.0, 0.0])
    scale = 1.0 / math.sqrt(g)

    def chunk(start, count):
        y = x1 + scale * standard_normals(seed, start, count, 4)
        return int(np.count_nonzero(~voronoi_member_24cell(y)))

    errors = _run(chunk, trials, chunk_size, workers)
    return McEstimate(trials, errors, seed)
