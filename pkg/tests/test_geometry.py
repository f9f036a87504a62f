import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polysep.geometry import (
    PHI,
    NotEquiEnergy,
    NotVertexTransitive,
    UnsupportedKind,
    canonical_kind,
    generate,
    kissing_number,
    min_distance,
    ml_detect,
    ml_detect_batch,
    normalize_energy,
    table_params,
    voronoi_member_24cell,
)

S5 = math.sqrt(5.0)

GENERATED = (
    [("polygon", None, m) for m in (3, 4, 5, 8, 16)]
    + [("cube", n, None) for n in range(1, 8)]
    + [("crosspolytope", n, None) for n in range(2, 8)]
    + [("simplex", n, None) for n in range(1, 8)]
    + [("cell24", None, None), ("icosahedron", None, None),
       ("dodecahedron", None, None), ("cell600", None, None)]
)
IDS = [f"{k}-{n or m or ''}" for k, n, m in GENERATED]


@pytest.mark.parametrize("kind,n,m", GENERATED, ids=IDS)
def test_constellation_invariants(kind, n, m):
    c = generate(kind, n=n, m=m)
    norms2 = np.einsum("ij,ij->i", c.points, c.points)
    np.testing.assert_allclose(norms2, c.symbol_energy, atol=1e-12)
    assert c.symbol_energy == 1.0
    diff = c.points[:, None] - c.points[None]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    off = dist[~np.eye(c.M, dtype=bool)]
    assert off.min() >= c.min_distance - 1e-12
    row = table_params(kind, n=n, m=m)
    assert c.M == row.M
    assert c.kissing == row.A or (c.M == 2)
    assert abs(c.d_over_sqrt_es - row.d_over_sqrt_es) < 1e-12


@pytest.mark.parametrize("kind,n,m,count", [
    ("polygon", None, 7, 7), ("cube", 5, None, 32), ("crosspolytope", 5, None, 10),
    ("simplex", 5, None, 6), ("cell24", None, None, 24), ("icosahedron", None, None, 12),
    ("dodecahedron", None, None, 20), ("cell600", None, None, 120),
])
def test_vertex_counts(kind, n, m, count):
    c = generate(kind, n=n, m=m)
    assert c.points.shape[0] == count
    assert len({tuple(np.round(p, 12)) for p in c.points}) == count


class TestExamples:
    def test_cube2(self):
        c = generate("cube", n=2)
        assert c.M == 4 and c.kissing == 2
        assert c.d_over_sqrt_es == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_cell24(self):
        c = generate("cell24")
        assert (c.M, c.kissing) == (24, 8)
        assert c.d_over_sqrt_es == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(c.points[0], np.array([1, 1, 0, 0]) / math.sqrt(2))

    def test_simplex2_equilateral(self):
        c = generate("simplex", n=2)
        d2 = [np.sum((c.points[i] - c.points[j]) ** 2) for i in range(3) for j in range(i)]
        np.testing.assert_allclose(d2, 3.0, atol=1e-12)

    def test_cube3_distance(self):
        assert generate("cube", n=3).min_distance == pytest.approx(2 / math.sqrt(3), abs=1e-12)

    def test_cell600_distance(self):
        c = generate("600cell")
        assert c.min_distance == pytest.approx((S5 - 1) / 2, abs=1e-12)
        assert c.kissing == 12

    def test_icosahedron(self):
        c = generate("icosahedron")
        assert c.kissing == 5
        assert c.min_distance == pytest.approx(math.sqrt(2 - 2 / S5), abs=1e-12)

    def test_crosspolytope5_kissing(self):
        assert generate("cp", n=5).kissing == 8

    def test_dodecahedron(self):
        c = generate("dodecahedron")
        assert c.kissing == 3
        assert c.min_distance == pytest.approx((S5 - 1) / math.sqrt(3), abs=1e-12)

    def test_points_read_only(self):
        c = generate("cube", n=3)
        with pytest.raises(ValueError):
            c.points[0, 0] = 5.0


@pytest.mark.parametrize("n", range(1, 12))
def test_simplex_centroid_at_origin(n):
    c = generate("simplex", n=n)
    assert np.all(np.abs(c.points.mean(axis=0)) < 1e-12)


def test_simplex_raw_norm():
    # raw vertices (1 - alpha, ...) and perms of (alpha - n, 1, ..., 1) have
    # squared norm n(sqrt(n+1) - 1)^2, not n^2
    for n in (2, 3, 6):
        a = math.sqrt(n + 1)
        first = np.full(n, 1 - a)
        rest = [np.where(np.arange(n) == k, a - n, 1.0) for k in range(n)]
        sq = [float(v @ v) for v in [first] + rest]
        np.testing.assert_allclose(sq, n * (a - 1) ** 2, rtol=1e-12)
    assert 2 * (math.sqrt(3) - 1) ** 2 == pytest.approx(1.0718, abs=1e-4)


def test_cell24_orientations_congruent():
    a = generate("cell24", orientation="rotated").points
    b = generate("cell24", orientation="standard").points

    def dists(p):
        diff = p[:, None] - p[None]
        return np.sort(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)).ravel())

    np.testing.assert_allclose(dists(a), dists(b), atol=1e-12)


class TestNormalize:
    def test_cell24_raw(self):
        raw = generate("cell24").points * math.sqrt(2)
        pts, es = normalize_energy(raw)
        assert es == 1.0
        assert min_distance(pts) == pytest.approx(1.0, abs=1e-12)

    def test_unit_polygon_unchanged(self):
        k = np.arange(6)
        raw = np.column_stack([np.cos(2 * np.pi * k / 6), np.sin(2 * np.pi * k / 6)])
        np.testing.assert_allclose(normalize_energy(raw)[0], raw, atol=1e-15)

    def test_simplex2_raw(self):
        a = math.sqrt(3)
        raw = np.array([[1 - a, 1 - a], [a - 2, 1], [1, a - 2]])
        # raw squared norm n(sqrt(n+1) - 1)^2 once centred
        pts, _ = normalize_energy(raw - raw.mean(axis=0))
        assert min_distance(pts) ** 2 == pytest.approx(3.0, abs=1e-12)

    def test_rejects_unequal(self):
        with pytest.raises(NotEquiEnergy):
            normalize_energy([[1.0, 0.0], [0.0, 2.0]])

    @settings(max_examples=30)
    @given(st.floats(1e-3, 1e3))
    def test_scale_invariance(self, s):
        c = generate("icosahedron")
        pts, _ = normalize_energy(c.points * s)
        np.testing.assert_allclose(pts, c.points, atol=1e-12)


def test_min_distance_degenerate():
    assert min_distance([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]) == 0.0
    with pytest.raises(ValueError):
        min_distance([[1.0, 0.0]])


def test_kissing_rejects_irregular():
    pts = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [math.cos(4), math.sin(4)]])
    with pytest.raises(NotVertexTransitive):
        kissing_number(pts, min_distance(pts))


def test_120cell_not_generated():
    with pytest.raises(UnsupportedKind):
        generate("120cell")
    row = table_params("cell120")
    assert (row.M, row.A, row.n) == (600, 4, 4)


def test_aliases():
    assert canonical_kind("24-cell") == "cell24"
    assert canonical_kind("CP") == "crosspolytope"
    with pytest.raises(ValueError):
        canonical_kind("torus")


class TestDetect:
    @pytest.mark.parametrize("kind,n,m", GENERATED[:12], ids=IDS[:12])
    def test_own_point(self, kind, n, m):
        c = generate(kind, n=n, m=m)
        for i, p in enumerate(c.points):
            assert ml_detect(p, c) == i

    def test_boundary_perturbed(self):
        c = generate("cell24")
        x0 = c.points[0]
        j = int(np.argsort(np.linalg.norm(c.points - x0, axis=1))[1])
        mid = (x0 + c.points[j]) / 2
        assert ml_detect(mid + 1e-9 * (x0 - mid) / np.linalg.norm(x0 - mid), c) == 0

    def test_tie_lowest_index(self):
        pts = np.array([[1.0, 0.0], [-1.0, 0.0]])
        assert ml_detect([0.0, 3.0], pts) == 0

    def test_batch_matches_scalar(self):
        c = generate("cell600")
        y = np.random.default_rng(0).standard_normal((500, 4))
        assert list(ml_detect_batch(y, c.points)) == [ml_detect(v, c) for v in y]

    def test_dimension_check(self):
        with pytest.raises(ValueError):
            ml_detect([1.0, 2.0], generate("cube", n=3))


class TestVoronoi24:
    def test_examples(self):
        assert voronoi_member_24cell([1, 1, 0, 0]) is True
        # boundary min(y1, y2) = max(|y3|, |y4|) counts as inside
        assert voronoi_member_24cell([1, 1, 1, 0]) is True
        assert voronoi_member_24cell([0, 1, 0, 0]) is True
        # min is 0 but max is 1
        assert voronoi_member_24cell([0, 1, 0, 1]) is False
        assert voronoi_member_24cell([-0.1, 5, 0, 0]) is False

    def test_agrees_with_ml_detection(self):
        c = generate("cell24")
        rng = np.random.default_rng(2024)
        y = c.points[0] + rng.standard_normal((1_000_000, 4)) * 0.6
        ml = ml_detect_batch(y, c.points) == 0
        np.testing.assert_array_equal(ml, voronoi_member_24cell(math.sqrt(2) * y))

    def test_agrees_at_gamma_10(self):
        c = generate("cell24")
        rng = np.random.default_rng(5)
        y = c.points[0] + rng.standard_normal((100_000, 4)) * math.sqrt(1 / 20)
        np.testing.assert_array_equal(ml_detect_batch(y, c.points) == 0,
                                      voronoi_member_24cell(math.sqrt(2) * y))


class TestTableParams:
    def test_printed_values(self):
        printed = {
            ("dodecahedron", None, None): (-2.59, 1.44),
            ("icosahedron", None, None): (-0.04, 1.19),
            ("cell24", None, None): (0.59, 1.15),
            ("cell600", None, None): (-1.81, 1.73),
            ("cube", 3, None): (0.0, 1.0),
        }
        for (k, n, m), (gb, s) in printed.items():
            row = table_params(k, n=n, m=m)
            assert abs(row.G_b_dB - gb) < 0.005, k
            assert abs(row.S - s) < 0.005, k

    def test_cube_exact_zero(self):
        for n in range(1, 10):
            row = table_params("cube", n=n)
            assert row.G_b_dB == 0.0 and row.S == 1.0

    def test_120cell(self):
        row = table_params("120cell")
        assert row.d_over_sqrt_es == pytest.approx((3 - S5) / (2 * math.sqrt(2)), abs=1e-15)
        assert row.S == pytest.approx(2.31, abs=0.005)
        # printed -7.73; the closed form gives -7.7389
        assert row.G_b_dB == pytest.approx(-7.7389, abs=1e-4)

    def test_golden_ratio(self):
        assert PHI * PHI == pytest.approx(PHI + 1, abs=1e-15)
