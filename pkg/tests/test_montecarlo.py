import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polysep.analytic import SnrPoint, sep_24cell, sep_cube, sep_mpsk
from polysep.geometry import generate
from polysep.montecarlo import (
    McEstimate,
    confidence_interval,
    simulate_24cell_region,
    simulate_sep,
    standard_normals,
    transmit_indices,
)


class TestWilson:
    def test_zero_errors(self):
        lo, hi = confidence_interval(0, 1000)
        assert lo == 0.0 and 0.0 < hi < 0.01

    def test_all_errors(self):
        assert confidence_interval(37, 37)[1] == 1.0

    def test_reference_case(self):
        # direct formula: z^2 = 1.959963985^2, n = 1e4, p = 0.05
        lo, hi = confidence_interval(500, 10_000)
        assert lo < 0.05 < hi
        assert (hi - lo) / 2 == pytest.approx(0.0043, abs=5e-5)
        z = 1.959963984540054
        n, p = 1e4, 0.05
        c = (p + z * z / (2 * n)) / (1 + z * z / n)
        assert (lo + hi) / 2 == pytest.approx(c, rel=1e-14)

    @settings(max_examples=100)
    @given(st.integers(1, 10_000), st.data())
    def test_contains_point_estimate(self, n, data):
        k = data.draw(st.integers(0, n))
        lo, hi = confidence_interval(k, n)
        assert 0.0 <= lo <= k / n <= hi <= 1.0

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            confidence_interval(5, 4)
        with pytest.raises(ValueError):
            confidence_interval(1, 10, level=1.0)


def test_noise_stream_is_standard_normal():
    z = standard_normals(3, 0, 200_000, 4)
    assert z.shape == (200_000, 4)
    np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=0.01)
    np.testing.assert_allclose(z.var(axis=0), 1.0, atol=0.01)
    assert np.all(np.isfinite(z))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**63), st.integers(0, 5000), st.integers(1, 300), st.integers(1, 5))
def test_noise_is_a_function_of_trial_index(seed, start, count, dim):
    whole = standard_normals(seed, 0, start + count, dim)
    part = standard_normals(seed, start, count, dim)
    np.testing.assert_array_equal(whole[start:], part)


def test_transmit_indices_uniform():
    idx = transmit_indices(4, 0, 240_000, 24)
    counts = np.bincount(idx, minlength=24)
    assert counts.min() > 9_400 and counts.max() < 10_600


class TestDeterminism:
    def test_same_seed_same_result(self):
        c = generate("cube", n=4)
        a = simulate_sep(c, 5.0, 50_000, seed=7)
        b = simulate_sep(c, 5.0, 50_000, seed=7)
        assert a == b

    @pytest.mark.parametrize("chunk,workers", [(1000, 1), (4096, 3), (1 << 17, 4), (777, 8)])
    def test_chunking_and_workers_do_not_matter(self, chunk, workers):
        c = generate("cell24")
        ref = simulate_sep(c, 8.0, 120_000, seed=11)
        got = simulate_sep(c, 8.0, 120_000, seed=11, chunk_size=chunk, workers=workers)
        assert got.errors == ref.errors

    def test_different_seeds_differ(self):
        a, b = standard_normals(1, 0, 1000, 4), standard_normals(2, 0, 1000, 4)
        assert not np.any(a == b)
        c = generate("cube", n=4)
        counts = {simulate_sep(c, 2.0, 20_000, s).errors for s in range(1, 6)}
        assert len(counts) > 1


def test_symbol_invariance():
    for kind, n, m in [("simplex", 3, None), ("polygon", None, 8), ("cell24", None, None)]:
        c = generate(kind, n=n, m=m)
        g = SnrPoint.from_gamma_b_db(4.0, c.M)
        a = simulate_sep(c, g, 400_000, 21)
        b = simulate_sep(c, g, 400_000, 21, uniform_symbols=True, workers=2)
        se = math.sqrt(a.p_hat * (1 - a.p_hat) / a.trials + b.p_hat * (1 - b.p_hat) / b.trials)
        assert abs(a.p_hat - b.p_hat) < 3.5 * se


def test_coverage_over_seeds():
    c = generate("cube", n=2)
    g = SnrPoint.from_gamma_b_db(2.0, 4)
    exact = sep_cube(2, g).p
    hits = 0
    for seed in range(200):
        lo, hi = simulate_sep(c, g, 4000, seed).wilson()
        hits += lo <= exact <= hi
    assert hits >= 180


def test_region_oracle_matches_ml():
    for gdb in (0.0, 6.0, 12.0):
        g = SnrPoint.from_gamma_b_db(gdb, 24)
        a = simulate_24cell_region(g, 200_000, 5)
        b = simulate_sep(generate("cell24"), g, 200_000, 5)
        assert a.errors == b.errors


def test_near_zero_snr():
    est = simulate_sep(generate("cell24"), 1e-4, 200_000, 3)
    assert est.p_hat == pytest.approx(23 / 24, abs=0.003)
    assert abs(est.p_hat - sep_24cell(1e-4).p) < 3.5 * est.wilson_halfwidth()


def test_against_exact_small():
    c = generate("polygon", m=8)
    g = SnrPoint.from_gamma_b_db(6.0, 8)
    est = simulate_sep(c, g, 300_000, 17)
    assert abs(est.p_hat - sep_mpsk(8, g).p) < 3.5 * est.wilson_halfwidth()


def test_estimate_fields():
    e = McEstimate(1000, 50, 1)
    assert e.p_hat == 0.05
    assert e.ci95_halfwidth == pytest.approx(1.96 * math.sqrt(0.05 * 0.95 / 1000))
    assert e.wilson_halfwidth() > 0


def test_rejects_bad_inputs():
    c = generate("cube", n=2)
    with pytest.raises(ValueError):
        simulate_sep(c, 1.0, 0, 1)
    with pytest.raises(ValueError):
        simulate_sep(c, 0.0, 10, 1)
