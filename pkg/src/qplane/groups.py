"""Orthogonal 2x2 matrices over F_q and the transport groups built on them.

O(2) is enumerated from the unit circle a^2 + b^2 = 1: rotations
[[a,-b],[b,a]] first, then the reflection coset [[a,b],[b,-a]], each
sorted by (a, b) index, so "first solution" tie-breaks are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .config import RunLimits
from .errors import (IsotropicRigidityError, NonSquareRatioError,
                     NormMismatchError, SizeLimitError, SpecError)
from .field import FieldCtx, FieldElement
from .geometry import Point, norm

__all__ = [
    "Orthogonal2", "G1Element", "ProductSimilarity", "Similarity",
    "unit_circle", "enumerate_SO2", "enumerate_O2", "solve_orthogonal",
    "find_isometry", "product_rigid_motion", "stabilizer_size",
    "enumerate_G1", "scaled_apply_vec",
]


@dataclass(frozen=True)
class Orthogonal2:
    """Matrix [[a, b], [c, d]] with entries as canonical indexes."""

    ctx: FieldCtx
    a: int
    b: int
    c: int
    d: int

    def apply(self, v: Point) -> Point:
        ctx = self.ctx
        y1 = ctx.add_idx(ctx.mul_idx(self.a, v.x1.index),
                         ctx.mul_idx(self.b, v.x2.index))
        y2 = ctx.add_idx(ctx.mul_idx(self.c, v.x1.index),
                         ctx.mul_idx(self.d, v.x2.index))
        return Point(ctx.element(y1), ctx.element(y2))

    def transpose(self) -> "Orthogonal2":
        return Orthogonal2(self.ctx, self.a, self.c, self.b, self.d)

    def compose(self, other: "Orthogonal2") -> "Orthogonal2":
        ctx = self.ctx
        m = ctx.mul_idx
        s = ctx.add_idx
        return Orthogonal2(
            ctx,
            s(m(self.a, other.a), m(self.b, other.c)),
            s(m(self.a, other.b), m(self.b, other.d)),
            s(m(self.c, other.a), m(self.d, other.c)),
            s(m(self.c, other.b), m(self.d, other.d)),
        )

    def det(self) -> int:
        ctx = self.ctx
        return ctx.sub_idx(ctx.mul_idx(self.a, self.d),
                           ctx.mul_idx(self.b, self.c))

    def is_orthogonal(self) -> bool:
        ctx = self.ctx
        m, s = ctx.mul_idx, ctx.add_idx
        return (s(m(self.a, self.a), m(self.c, self.c)) == 1
                and s(m(self.b, self.b), m(self.d, self.d)) == 1
                and s(m(self.a, self.b), m(self.c, self.d)) == 0)

    def entries(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    @staticmethod
    def identity(ctx: FieldCtx) -> "Orthogonal2":
        return Orthogonal2(ctx, 1, 0, 0, 1)

    @staticmethod
    def rotation(ctx: FieldCtx, a: int, b: int) -> "Orthogonal2":
        return Orthogonal2(ctx, a, ctx.neg_idx(b), b, a)

    @staticmethod
    def reflection(ctx: FieldCtx, a: int, b: int) -> "Orthogonal2":
        return Orthogonal2(ctx, a, b, b, ctx.neg_idx(a))

    def __repr__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def unit_circle(ctx: FieldCtx) -> list[tuple[int, int]]:
    """Solutions (a, b) of a^2 + b^2 = 1, sorted by index pair."""
    def build():
        sols = []
        for a in range(ctx.q):
            t = ctx.sub_idx(1, ctx.mul_idx(a, a))
            roots = ctx.sqrt_idx(t)
            if roots is None:
                continue
            for b in sorted(set(roots)):
                sols.append((a, b))
        return sorted(sols)
    return ctx.memo("unit_circle", build)


def enumerate_SO2(ctx: FieldCtx) -> list[Orthogonal2]:
    def build():
        return [Orthogonal2.rotation(ctx, a, b) for a, b in unit_circle(ctx)]
    return ctx.memo("so2", build)


def enumerate_O2(ctx: FieldCtx) -> list[Orthogonal2]:
    """Rotations first, then reflections; duplicate-free."""
    def build():
        refl = [Orthogonal2.reflection(ctx, a, b) for a, b in unit_circle(ctx)]
        return enumerate_SO2(ctx) + refl
    return ctx.memo("o2", build)


def solve_orthogonal(v: Point, w: Point) -> list[Orthogonal2]:
    """All theta in O(2) with theta v = w; requires equal norms."""
    if norm(v) != norm(w):
        raise NormMismatchError("cannot map between different norms")
    return [th for th in enumerate_O2(v.ctx) if th.apply(v) == w]


def stabilizer_size(v: Point) -> int:
    return len(solve_orthogonal(v, v))


def find_isometry(u: Point, v: Point, x: Point, y: Point
                  ) -> tuple[Orthogonal2, Point]:
    """A rigid motion (theta, z) with theta u + z = x and theta v + z = y.

    Deterministic: the first valid theta in enumeration order is chosen.
    Nonzero isotropic differences are rejected; the two-point transport
    guarantee only covers differences of nonzero norm.
    """
    d1 = u - v
    d2 = x - y
    if norm(d1) != norm(d2):
        raise NormMismatchError("pair distances differ")
    ctx = u.ctx
    if d1.is_zero() and d2.is_zero():
        return Orthogonal2.identity(ctx), x - u
    if norm(d1).index == 0:
        raise IsotropicRigidityError(
            "difference of norm 0 with distinct endpoints")
    theta = solve_orthogonal(d1, d2)[0]
    z = x - theta.apply(u)
    assert theta.apply(v) + z == y
    return theta, z


class G1Element(NamedTuple):
    """A block diagonal pair (r1*theta1, r2*theta2) with r1*r2 = 1."""

    r1: FieldElement
    theta1: Orthogonal2
    r2: FieldElement
    theta2: Orthogonal2


def enumerate_G1(ctx: FieldCtx, limits: Optional[RunLimits] = None
                 ) -> list[G1Element]:
    """All (q-1)*|O(2)|^2 elements, r1 ascending, identity exactly once."""
    limits = limits or RunLimits()
    if ctx.q > limits.g1_max_q:
        raise SizeLimitError(
            f"product-group enumeration for q={ctx.q} exceeds the cap "
            f"{limits.g1_max_q}")
    o2 = enumerate_O2(ctx)
    out = []
    for r1 in range(1, ctx.q):
        r2 = ctx.inv_idx(r1)
        for th1 in o2:
            for th2 in o2:
                out.append(G1Element(ctx.element(r1), th1,
                                     ctx.element(r2), th2))
    return out


@dataclass(frozen=True)
class ProductSimilarity:
    """Element of the product transport group: the block scaled-orthogonal
    pair of a G1Element plus a translation in each factor."""

    r1: FieldElement
    theta1: Orthogonal2
    r2: FieldElement
    theta2: Orthogonal2
    z1: Point
    z2: Point

    def __post_init__(self):
        if (self.r1 * self.r2).index != 1:
            raise SpecError("scale factors must multiply to 1")

    def apply(self, pair: tuple[Point, Point]) -> tuple[Point, Point]:
        a, b = pair
        return (self.theta1.apply(a).scale(self.r1) + self.z1,
                self.theta2.apply(b).scale(self.r2) + self.z2)

    @property
    def linear(self) -> G1Element:
        return G1Element(self.r1, self.theta1, self.r2, self.theta2)


def product_rigid_motion(x1: Point, y1: Point, x2: Point, y2: Point,
                         x3: Point, y3: Point, x4: Point, y4: Point
                         ) -> ProductSimilarity:
    """A product transport g with g(x1,x2) = (x3,x4) and g(y1,y2) = (y3,y4).

    Requires ||x1-y1||*||x2-y2|| = ||x3-y3||*||x4-y4|| != 0 and the ratio
    ||x4-y4|| / ||x2-y2|| to be a square.  Built constructively: split the
    common ratio r = t^2 across the two factors and solve each factor as
    a plain isometry; the result is verified on both point pairs.
    """
    ctx = x1.ctx
    n1, n2, n3, n4 = (norm(x1 - y1), norm(x2 - y2),
                      norm(x3 - y3), norm(x4 - y4))
    lhs = n1 * n2
    if lhs != n3 * n4 or lhs.index == 0:
        raise SpecError("distance products must be equal and nonzero")
    r = n4 / n2
    roots = r.sqrt()
    if roots is None:
        raise NonSquareRatioError(f"distance ratio {r.index} is not a square")
    t = roots[0]
    tinv = t.inverse()
    theta1, z1 = find_isometry(x1.scale(tinv), y1.scale(tinv), x3, y3)
    theta2, z2 = find_isometry(x2.scale(t), y2.scale(t), x4, y4)
    g = ProductSimilarity(tinv, theta1, t, theta2, z1, z2)
    assert g.apply((x1, x2)) == (x3, x4)
    assert g.apply((y1, y2)) == (y3, y4)
    return g


@dataclass(frozen=True)
class Similarity:
    """Scale-and-shift transport (lam, z): a -> lam * a + z, composing
    componentwise: (lam, z1) * (beta, z2) = (lam*beta, z1+z2)."""

    lam: FieldElement
    z: Point

    def apply(self, a: Point) -> Point:
        return a.scale(self.lam) + self.z

    def compose(self, other: "Similarity") -> "Similarity":
        return Similarity(self.lam * other.lam, self.z + other.z)

    def inverse(self) -> "Similarity":
        return Similarity(self.lam.inverse(), -self.z)

    @staticmethod
    def identity(ctx: FieldCtx) -> "Similarity":
        return Similarity(ctx.one, Point(ctx.zero, ctx.zero))


def scaled_apply_vec(ctx: FieldCtx, r: int, theta: Orthogonal2,
                     x1: np.ndarray, x2: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Images of coordinate arrays under v -> r * theta(v)."""
    y1 = ctx.add_vec(ctx.mul_row(theta.a)[x1], ctx.mul_row(theta.b)[x2])
    y2 = ctx.add_vec(ctx.mul_row(theta.c)[x1], ctx.mul_row(theta.d)[x2])
    if r != 1:
        row = ctx.mul_row(r)
        y1, y2 = row[y1], row[y2]
    return y1, y2
