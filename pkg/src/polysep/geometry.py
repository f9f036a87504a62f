"""Regular-polytope constellations: vertex generation, distances, ML detection."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from polysep import metrics

PHI = (1.0 + math.sqrt(5.0)) / 2.0

# Canonical kind names, plus the spellings accepted on input.
KINDS = ("polygon", "cube", "crosspolytope", "simplex", "cell24",
         "icosahedron", "dodecahedron", "cell600", "cell120")
_ALIASES = {
    "psk": "polygon", "ncube": "cube", "orthoplex": "crosspolytope",
    "cp": "crosspolytope", "24cell": "cell24", "24-cell": "cell24",
    "600cell": "cell600", "600-cell": "cell600",
    "120cell": "cell120", "120-cell": "cell120",
}
# Kinds whose size parameter is the dimension n (polygon takes M instead).
DIMENSIONED = ("cube", "crosspolytope", "simplex")
# Kinds with an exact SEP formula.
EXACT_KINDS = ("polygon", "cube", "crosspolytope", "simplex", "cell24")

EQUI_ENERGY_TOL = 1e-9
KISSING_RTOL = 1e-9


class UnsupportedKind(ValueError):
    """Vertex generation is not available for this polytope."""


class NotEquiEnergy(ValueError):
    """Input points do not share a common norm."""


class NotVertexTransitive(ValueError):
    """Vertices disagree on their nearest-neighbour count."""


def canonical_kind(kind: str) -> str:
    k = kind.strip().lower()
    k = _ALIASES.get(k, k)
    if k not in KINDS:
        raise UnsupportedKind(f"unknown polytope kind {kind!r}")
    return k


@dataclass(frozen=True)
class Constellation:
    """An energy-normalized RCP vertex set with cached geometry.

    ``size`` is the kind's size parameter: M for polygons, n for the generic
    families, ``None`` otherwise.
    """

    kind: str
    size: int | None
    points: np.ndarray = field(repr=False)
    symbol_energy: float
    min_distance: float
    kissing: int
    orientation: str | None = None

    @property
    def n(self) -> int:
        return int(self.points.shape[1])

    @property
    def M(self) -> int:
        return int(self.points.shape[0])

    @property
    def d_over_sqrt_es(self) -> float:
        return self.min_distance / math.sqrt(self.symbol_energy)

    @property
    def label(self) -> str:
        return kind_label(self.kind, self.size)


def kind_label(kind: str, size: int | None = None) -> str:
    kind = canonical_kind(kind)
    if kind in DIMENSIONED or kind == "polygon":
        return f"{kind}{size}"
    return kind


# -- raw vertex sets -------------------------------------------------------

def _polygon(m: int) -> np.ndarray:
    k = np.arange(m)
    return np.column_stack([np.cos(2 * np.pi * k / m), np.sin(2 * np.pi * k / m)])


def _cube(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def _crosspolytope(n: int) -> np.ndarray:
    eye = np.eye(n)
    return np.concatenate([eye, -eye])


def _simplex(n: int) -> np.ndarray:
    # (1-a, ..., 1-a) and all permutations of (a-n, 1, ..., 1), a = +sqrt(n+1)
    a = math.sqrt(n + 1.0)
    pts = np.ones((n + 1, n))
    pts[0, :] = 1.0 - a
    for i in range(n):
        pts[i + 1, i] = a - n
    return pts


def _signed_perms(base) -> list[tuple[float, ...]]:
    """All distinct permutations of ``base`` with every sign combination."""
    out = set()
    for perm in itertools.permutations(base):
        nz = [i for i, v in enumerate(perm) if v != 0]
        for signs in itertools.product((1.0, -1.0), repeat=len(nz)):
            v = list(perm)
            for i, s in zip(nz, signs):
                v[i] = s * v[i]
            out.add(tuple(float(t) for t in v))
    return sorted(out, reverse=True)


def _cell24(orientation: str) -> np.ndarray:
    if orientation == "rotated":
        return np.array(_signed_perms((1, 1, 0, 0)))
    if orientation == "standard":
        return np.concatenate([_cube(4), 2.0 * _crosspolytope(4)])
    raise ValueError("cell24 orientation must be 'rotated' or 'standard'")


def _cyclic(v) -> list[tuple[float, ...]]:
    return [tuple(v[(i + k) % 3] for i in range(3)) for k in range(3)]


def _with_signs(v) -> list[tuple[float, ...]]:
    nz = [i for i, t in enumerate(v) if t != 0]
    out = []
    for signs in itertools.product((1.0, -1.0), repeat=len(nz)):
        w = list(v)
        for i, s in zip(nz, signs):
            w[i] = s * w[i]
        out.append(tuple(w))
    return out


def _icosahedron() -> np.ndarray:
    pts = [w for v in _cyclic((0.0, 1.0, PHI)) for w in _with_signs(v)]
    return np.array(pts)


def _dodecahedron() -> np.ndarray:
    pts = [tuple(v) for v in _cube(3)]
    pts += [w for v in _cyclic((0.0, 1.0 / PHI, PHI)) for w in _with_signs(v)]
    return np.array(pts)


def _even_permutations(n: int):
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        if inversions % 2 == 0:
            yield perm


def _cell600() -> np.ndarray:
    pts = [tuple(v) for v in _crosspolytope(4)]
    pts += [tuple(0.5 * v) for v in _cube(4)]
    base = (PHI / 2.0, 0.5, 1.0 / (2.0 * PHI), 0.0)
    for perm in _even_permutations(4):
        v = tuple(base[perm[i]] for i in range(4))
        pts += _with_signs(v)
    return np.array(pts)


# -- measurements ----------------------------------------------------------

def _sq_dists(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def normalize_energy(points) -> tuple[np.ndarray, float]:
    """Scale equi-energy points onto the unit sphere; returns ``(points, 1.0)``."""
    pts = np.asarray(points, dtype=float)
    norms = np.linalg.norm(pts, axis=1)
    if norms.min() <= 0.0:
        raise NotEquiEnergy("a point sits at the origin")
    if norms.max() - norms.min() > EQUI_ENERGY_TOL * norms.max():
        raise NotEquiEnergy(
            f"point norms range over [{norms.min():.12g}, {norms.max():.12g}]")
    return pts / norms[:, None], 1.0


def min_distance(points) -> float:
    """Smallest pairwise Euclidean distance (0 for repeated points)."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        raise ValueError("need at least two points")
    d2 = _sq_dists(pts)
    iu = np.triu_indices(pts.shape[0], k=1)
    return math.sqrt(max(float(d2[iu].min()), 0.0))


def kissing_number(points, d: float) -> int:
    """Number of neighbours at distance ``d`` from each vertex.

    Raises :class:`NotVertexTransitive` if the count differs between vertices.
    """
    pts = np.asarray(points, dtype=float)
    d2 = _sq_dists(pts)
    lo, hi = (d * (1 - KISSING_RTOL)) ** 2, (d * (1 + KISSING_RTOL)) ** 2
    counts = ((d2 >= lo) & (d2 <= hi)).sum(axis=1)
    if np.any(counts != counts[0]):
        raise NotVertexTransitive(
            f"kissing numbers range over {counts.min()}..{counts.max()}")
    return int(counts[0])


def generate(kind: str, n: int | None = None, m: int | None = None,
             orientation: str = "rotated") -> Constellation:
    """Build a unit-energy constellation.

    ``n`` is the dimension for cube, crosspolytope and simplex; ``m`` the
    number of points for polygons.  ``orientation`` picks the 24-cell
    coordinates: ``"rotated"`` is the signed permutations of (1, 1, 0, 0)
    with (1, 1, 0, 0) first, ``"standard"`` the union of the 4-cube and the
    scaled 4-crosspolytope.
    """
    kind = canonical_kind(kind)
    size = None
    orient = None
    if kind == "polygon":
        if m is None or m < 2:
            raise ValueError("polygon needs m >= 3 (m = 2 is accepted as BPSK)")
        raw, size = _polygon(m), m
    elif kind == "cube":
        if n is None or n < 1:
            raise ValueError("cube needs n >= 1")
        raw, size = _cube(n), n
    elif kind == "crosspolytope":
        if n is None or n < 2:
            raise ValueError("crosspolytope needs n >= 2")
        raw, size = _crosspolytope(n), n
    elif kind == "simplex":
        if n is None or n < 1:
            raise ValueError("simplex needs n >= 1")
        raw, size = _simplex(n), n
    elif kind == "cell24":
        raw, orient = _cell24(orientation), orientation
    elif kind == "icosahedron":
        raw = _icosahedron()
    elif kind == "dodecahedron":
        raw = _dodecahedron()
    elif kind == "cell600":
        raw = _cell600()
    else:
        raise UnsupportedKind("120-cell vertices are not generated; use table_params")
    pts, es = normalize_energy(raw)
    pts.setflags(write=False)
    d = min_distance(pts)
    return Constellation(kind, size, pts, es, d, kissing_number(pts, d), orient)


def ml_detect(y, c: Constellation | np.ndarray) -> int:
    """Index of the closest constellation point; ties go to the lowest index."""
    pts = c.points if isinstance(c, Constellation) else np.asarray(c, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != (pts.shape[1],):
        raise ValueError(f"expected a {pts.shape[1]}-vector")
    diff = pts - y
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def ml_detect_batch(y: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Vectorized :func:`ml_detect` over the rows of ``y``."""
    # ||y - x||^2 minus the common ||y||^2 term
    d2 = np.einsum("ij,ij->i", points, points)[None, :] - 2.0 * (y @ points.T)
    return np.argmin(d2, axis=1)


def voronoi_member_24cell(y) -> bool | np.ndarray:
    """Is ``y`` in the decision region of (1, 1, 0, 0) for Pi(+-1, +-1, 0, 0)?

    The cell is min(y1, y2) >= max(|y3|, |y4|).  Accepts one 4-vector or an
    array of them along the last axis.
    """
    y = np.asarray(y, dtype=float)
    inside = (np.minimum(y[..., 0], y[..., 1])
              >= np.maximum(np.abs(y[..., 2]), np.abs(y[..., 3])))
    return bool(inside) if inside.ndim == 0 else inside


class TableRow(NamedTuple):
    M: int
    A: int
    d_over_sqrt_es: float
    G_b_dB: float
    S: float
    n: int


def table_params(kind: str, n: int | None = None, m: int | None = None) -> TableRow:
    """Closed-form M, A, d/sqrt(Es), G_b (dB) and S of an RCP."""
    kind = canonical_kind(kind)
    s5 = math.sqrt(5.0)
    if kind == "polygon":
        if m is None or m < 2:
            raise ValueError("polygon needs m")
        dim, M, A, d = 2, m, 2, 2.0 * math.sin(math.pi / m)
        if m == 2:
            A = 1
    elif kind == "cube":
        dim, M, A, d = n, 2 ** n, n, 2.0 / math.sqrt(n)
    elif kind == "crosspolytope":
        dim, M, A, d = n, 2 * n, 2 * (n - 1), math.sqrt(2.0)
    elif kind == "simplex":
        dim, M, A, d = n, n + 1, n, math.sqrt(2.0 + 2.0 / n)
    elif kind == "dodecahedron":
        dim, M, A, d = 3, 20, 3, (s5 - 1.0) / math.sqrt(3.0)
    elif kind == "icosahedron":
        dim, M, A, d = 3, 12, 5, math.sqrt(2.0 - 2.0 / s5)
    elif kind == "cell24":
        dim, M, A, d = 4, 24, 8, 1.0
    elif kind == "cell120":
        dim, M, A, d = 4, 600, 4, (3.0 - s5) / (2.0 * math.sqrt(2.0))
    else:
        dim, M, A, d = 4, 120, 12, (s5 - 1.0) / 2.0
    if kind in DIMENSIONED and (n is None or n < 1):
        raise ValueError(f"{kind} needs n")
    g_db = metrics.db(metrics.power_efficiency(d, M))
    # cube and square rows are exactly 0 dB; drop the rounding residue
    if abs(g_db) < 1e-12:
        g_db = 0.0
    return TableRow(M, A, d, g_db, metrics.spectral_efficiency(M, dim), dim)
