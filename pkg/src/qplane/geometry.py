"""Points and subsets of the plane over F_q.

A point is a coordinate pair; point sets carry a sorted array of packed
ids (pid = x1.index * q + x2.index) plus an O(1) indicator over the q^2
grid.  The quadratic form here is x1^2 + x2^2 -- not a metric: it can
vanish on nonzero vectors whenever -1 is a square (q = 1 mod 4).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import SpecError
from .field import FieldCtx, FieldElement

__all__ = [
    "Point", "PointSet", "ValueSet", "norm", "distance_set",
    "set_product", "set_quotient", "set_sum", "sphere",
    "zero_distance_pairs", "direction_set", "scale_set",
    "square_class_pairs", "generate", "difference_counts",
    "norm_pair_counts", "plane_norms", "direction_class_ids",
]

_PAIR_BLOCK = 4_000_000  # max broadcast pairs per chunk


@dataclass(frozen=True)
class Point:
    """A point of F_q^2."""

    x1: FieldElement
    x2: FieldElement

    def __post_init__(self):
        if self.x1.ctx.key != self.x2.ctx.key:
            raise SpecError("point coordinates from different fields")

    @property
    def ctx(self) -> FieldCtx:
        return self.x1.ctx

    @property
    def pid(self) -> int:
        return self.x1.index * self.ctx.q + self.x2.index

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> "Point":
        return Point(-self.x1, -self.x2)

    def scale(self, lam: FieldElement) -> "Point":
        return Point(lam * self.x1, lam * self.x2)

    def is_zero(self) -> bool:
        return self.x1.index == 0 and self.x2.index == 0

    @staticmethod
    def from_pid(ctx: FieldCtx, pid: int) -> "Point":
        return Point(ctx.element(pid // ctx.q), ctx.element(pid % ctx.q))

    def __repr__(self) -> str:
        return f"({self.x1.index},{self.x2.index})"


def norm(v: Point) -> FieldElement:
    """Quadratic form x1^2 + x2^2."""
    return v.x1 * v.x1 + v.x2 * v.x2


class PointSet:
    """A deduplicated subset of the plane with O(1) membership."""

    def __init__(self, ctx: FieldCtx, pids: Iterable[int]):
        self.ctx = ctx
        arr = np.unique(np.asarray(list(pids) if not isinstance(pids, np.ndarray)
                                   else pids, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= ctx.q * ctx.q):
            raise SpecError("point id out of range")
        self.pids = arr
        ind = np.zeros(ctx.q * ctx.q, dtype=bool)
        ind[arr] = True
        self.indicator = ind
        self.pids.setflags(write=False)
        self.indicator.setflags(write=False)

    @classmethod
    def from_points(cls, ctx: FieldCtx, points: Iterable[Point]) -> "PointSet":
        return cls(ctx, [pt.pid for pt in points])

    @classmethod
    def full_plane(cls, ctx: FieldCtx) -> "PointSet":
        return cls(ctx, np.arange(ctx.q * ctx.q, dtype=np.int64))

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        return self.pids // self.ctx.q, self.pids % self.ctx.q

    def points(self) -> Iterator[Point]:
        return (Point.from_pid(self.ctx, int(pid)) for pid in self.pids)

    def indicator_grid(self) -> np.ndarray:
        return self.indicator.reshape(self.ctx.q, self.ctx.q)

    def __len__(self) -> int:
        return int(self.pids.size)

    def __iter__(self) -> Iterator[Point]:
        return self.points()

    def __contains__(self, pt: Point) -> bool:
        return bool(self.indicator[pt.pid])

    def __eq__(self, other) -> bool:
        return (isinstance(other, PointSet) and self.ctx.key == other.ctx.key
                and np.array_equal(self.pids, other.pids))

    def __repr__(self) -> str:
        return f"PointSet(q={self.ctx.q}, size={len(self)})"


class ValueSet:
    """A subset of F_q held as flags, with optional notes."""

    def __init__(self, ctx: FieldCtx, flags: np.ndarray,
                 notes: tuple[str, ...] = ()):
        self.ctx = ctx
        self.flags = np.asarray(flags, dtype=bool).copy()
        self.flags.setflags(write=False)
        self.notes = notes

    @classmethod
    def from_indexes(cls, ctx: FieldCtx, indexes: Iterable[int],
                     notes: tuple[str, ...] = ()) -> "ValueSet":
        flags = np.zeros(ctx.q, dtype=bool)
        for i in indexes:
            flags[i] = True
        return cls(ctx, flags, notes)

    def values(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.flags)]

    def elements(self) -> list[FieldElement]:
        return [self.ctx.element(i) for i in self.values()]

    def __len__(self) -> int:
        return int(self.flags.sum())

    def __contains__(self, item) -> bool:
        idx = item.index if isinstance(item, FieldElement) else int(item)
        return bool(self.flags[idx])

    def __eq__(self, other) -> bool:
        return (isinstance(other, ValueSet) and self.ctx.key == other.ctx.key
                and np.array_equal(self.flags, other.flags))

    def __repr__(self) -> str:
        return f"ValueSet({self.values()})"


# ---------------------------------------------------------------------------
# cached grid tables
# ---------------------------------------------------------------------------

def plane_norms(ctx: FieldCtx) -> np.ndarray:
    """Norm index of every grid point, as a flat (q^2,) array."""
    def build():
        idx = np.arange(ctx.q, dtype=np.int64)
        sq = ctx.square_vec(idx)
        out = ctx.add_vec(sq[:, None], sq[None, :]).ravel()
        out.setflags(write=False)
        return out
    return ctx.memo("plane_norms", build)


def direction_class_ids(ctx: FieldCtx) -> np.ndarray:
    """Projective class id per grid vector: slope s for (1,s)-classes,
    q for the (0,1) class, -1 for the zero vector."""
    def build():
        q = ctx.q
        w = np.arange(q * q, dtype=np.int64)
        w1, w2 = w // q, w % q
        ids = np.full(q * q, -1, dtype=np.int64)
        m = w1 != 0
        ids[m] = ctx.mul_vec(w2[m], ctx.inv_table[w1[m]])
        m0 = (w1 == 0) & (w2 != 0)
        ids[m0] = q
        ids.setflags(write=False)
        return ids
    return ctx.memo("direction_class_ids", build)


# ---------------------------------------------------------------------------
# pairwise counts
# ---------------------------------------------------------------------------

def _offset_counts(ctx: FieldCtx, from1, from2, to1, to2) -> np.ndarray:
    """Counts of pid(to - from) over the full (from, to) pair grid."""
    q = ctx.q
    cnt = np.zeros(q * q, dtype=np.int64)
    n, m = len(from1), len(to1)
    if n == 0 or m == 0:
        return cnt
    block = max(1, _PAIR_BLOCK // m)
    for i0 in range(0, n, block):
        f1 = from1[i0:i0 + block, None]
        f2 = from2[i0:i0 + block, None]
        d1 = ctx.sub_vec(to1[None, :], f1)
        d2 = ctx.sub_vec(to2[None, :], f2)
        cnt += np.bincount((d1 * q + d2).ravel(), minlength=q * q)
    return cnt


def difference_counts(E: PointSet) -> np.ndarray:
    """cnt(w) = number of ordered pairs (u, v) in E^2 with u - v = w."""
    x1, x2 = E.coords()
    return _offset_counts(E.ctx, x1, x2, x1, x2)


def norm_pair_counts(E: PointSet) -> np.ndarray:
    """r(t) = number of ordered pairs of E at distance t, as a (q,) array."""
    cnt = difference_counts(E)
    out = np.zeros(E.ctx.q, dtype=np.int64)
    np.add.at(out, plane_norms(E.ctx), cnt)
    return out


# ---------------------------------------------------------------------------
# value sets
# ---------------------------------------------------------------------------

def distance_set(E: PointSet) -> ValueSet:
    """All attained pair distances, 0 included."""
    if len(E) == 0:
        raise SpecError("distance set of the empty set")
    cnt = difference_counts(E)
    flags = np.zeros(E.ctx.q, dtype=bool)
    flags[plane_norms(E.ctx)[cnt > 0]] = True
    return ValueSet(E.ctx, flags)


def set_product(A: ValueSet, B: ValueSet) -> ValueSet:
    ctx = A.ctx
    flags = np.zeros(ctx.q, dtype=bool)
    for a in A.values():
        for b in B.values():
            flags[ctx.mul_idx(a, b)] = True
    return ValueSet(ctx, flags)


def set_quotient(A: ValueSet, B: ValueSet) -> ValueSet:
    """{a/b : a in A, b in B, b != 0}; flags the all-zero-denominator case."""
    ctx = A.ctx
    flags = np.zeros(ctx.q, dtype=bool)
    denominators = [b for b in B.values() if b != 0]
    notes: tuple[str, ...] = ()
    if len(B) > 0 and not denominators:
        notes = ("empty quotient: denominator set contains only 0",)
    for b in denominators:
        binv = ctx.inv_idx(b)
        for a in A.values():
            flags[ctx.mul_idx(a, binv)] = True
    return ValueSet(ctx, flags, notes)


def set_sum(A: ValueSet, B: ValueSet) -> ValueSet:
    ctx = A.ctx
    flags = np.zeros(ctx.q, dtype=bool)
    for a in A.values():
        for b in B.values():
            flags[ctx.add_idx(a, b)] = True
    return ValueSet(ctx, flags)


# ---------------------------------------------------------------------------
# spheres and pair classes
# ---------------------------------------------------------------------------

def sphere(ctx: FieldCtx, t) -> PointSet:
    """All grid points of norm t."""
    t_idx = t.index if isinstance(t, FieldElement) else int(t)
    return PointSet(ctx, np.flatnonzero(plane_norms(ctx) == t_idx))


def zero_distance_pairs(E: PointSet) -> int:
    """Ordered pairs at distance 0, diagonal included."""
    return int(norm_pair_counts(E)[0])


def square_class_pairs(E: PointSet) -> tuple[int, int, int]:
    """Ordered pair counts (|A|, |B|, |Z|) by square class of the distance:
    nonzero-square, nonzero-non-square, zero."""
    hist = norm_pair_counts(E)
    sq = E.ctx.is_square_table
    a = int(hist[sq & (np.arange(E.ctx.q) != 0)].sum())
    b = int(hist[~sq].sum())
    z = int(hist[0])
    return a, b, z


# ---------------------------------------------------------------------------
# directions and scales
# ---------------------------------------------------------------------------

def direction_set(E: PointSet) -> tuple[Point, ...]:
    """Canonical representatives (first nonzero coordinate scaled to 1)
    of the classes of nonzero difference vectors, sorted by pid."""
    if len(E) < 2:
        raise SpecError("direction set needs at least two points")
    ctx = E.ctx
    cnt = difference_counts(E)
    ids = direction_class_ids(ctx)
    present = np.unique(ids[(cnt > 0) & (ids >= 0)])
    reps = []
    for cid in present:
        if cid == ctx.q:
            reps.append(Point(ctx.zero, ctx.one))
        else:
            reps.append(Point(ctx.one, ctx.element(int(cid))))
    return tuple(sorted(reps, key=lambda pt: pt.pid))


def scale_set(E: PointSet) -> ValueSet:
    """lambda such that u1 - v1 = lambda * (u2 - v2) for some points of E
    with u2 != v2 (the nonzero-denominator convention)."""
    if len(E) < 2:
        raise SpecError("scale set needs at least two points")
    ctx = E.ctx
    q = ctx.q
    cnt = difference_counts(E)
    have = cnt > 0
    nz = np.flatnonzero(have)
    nz = nz[nz != 0]
    w1, w2 = nz // q, nz % q
    flags = np.zeros(q, dtype=bool)
    for lam in range(q):
        row = ctx.mul_row(lam)
        flags[lam] = bool(have[row[w1] * q + row[w2]].any())
    return ValueSet(ctx, flags)


# ---------------------------------------------------------------------------
# deterministic generators
# ---------------------------------------------------------------------------

_POINTS_RE = re.compile(r"^\((\d+),(\d+)\)$")


def generate(ctx: FieldCtx, spec: str, seed: int = 0) -> PointSet:
    """Build a point set from a spec string, deterministically per seed.

    Grammar: ``all`` | ``random:<N>`` | ``grid`` | ``line:<a>,<b>,<c>``
    (the line a*x + b*y = c) | ``sphere:<t>`` | ``points:(x,y);(x,y);...``
    Coordinates and parameters are canonical element indexes.
    """
    q = ctx.q
    spec = spec.strip()
    if spec == "all":
        return PointSet.full_plane(ctx)
    if spec == "grid":
        p = ctx.p
        pids = [a * q + b for a in range(p) for b in range(p)]
        return PointSet(ctx, pids)
    if spec.startswith("random:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise SpecError(f"malformed random spec {spec!r}") from None
        if n < 0 or n > q * q:
            raise SpecError(f"random size {n} out of range [0, {q * q}]")
        rng = np.random.default_rng(seed)
        pids = rng.choice(q * q, size=n, replace=False)
        return PointSet(ctx, pids)
    if spec.startswith("line:"):
        parts = spec.split(":", 1)[1].split(",")
        if len(parts) != 3:
            raise SpecError(f"malformed line spec {spec!r}")
        try:
            a, b, c = (int(s) % q for s in parts)
        except ValueError:
            raise SpecError(f"malformed line spec {spec!r}") from None
        if a == 0 and b == 0:
            raise SpecError("line spec needs (a, b) != (0, 0)")
        idx = np.arange(q, dtype=np.int64)
        if b != 0:
            binv = ctx.inv_idx(b)
            y = ctx.mul_vec(np.full(q, binv, dtype=np.int64),
                            ctx.sub_vec(np.full(q, c, dtype=np.int64),
                                        ctx.mul_row(a)[idx]))
            pids = idx * q + y
        else:
            x = ctx.mul_idx(ctx.inv_idx(a), c)
            pids = x * q + idx
        return PointSet(ctx, pids)
    if spec.startswith("sphere:"):
        try:
            t = int(spec.split(":", 1)[1])
        except ValueError:
            raise SpecError(f"malformed sphere spec {spec!r}") from None
        if not 0 <= t < q:
            raise SpecError(f"sphere parameter {t} out of range")
        return sphere(ctx, t)
    if spec.startswith("points:"):
        body = spec.split(":", 1)[1]
        pids = []
        for token in body.split(";"):
            m = _POINTS_RE.match(token.strip())
            if not m:
                raise SpecError(f"malformed point token {token!r}")
            x, y = int(m.group(1)), int(m.group(2))
            if x >= q or y >= q:
                raise SpecError(f"point ({x},{y}) out of range for q={q}")
            pids.append(x * q + y)
        return PointSet(ctx, pids)
    raise SpecError(f"unknown set spec {spec!r}")
