"""Exact integer counting kernels for pair-transport statistics.

Every count here is computed in exact integer arithmetic from pair (or
histogram) data; the spectral identity checks compare those exact tables
against float spectra but never feed floats back into a count.  Energy
totals that can overflow int64 are accumulated as Python ints.

Backbone: shift_count_table counts, for a linear map s of the plane,
the pairs (a, b) of E^2 with s(a) + z = b, for every offset z.  The
lambda-transport tables (s = scalar lambda), the scaled-rotation tables
(s = sqrt(r) * theta), and the factors of the four-coordinate transport
tables are all instances of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .config import RunLimits
from .errors import SizeLimitError, SpecError
from .field import FieldCtx, FieldElement
from .fourier import char_matrix, dft4_real_table, dft_indicator, dft_real_table
from .geometry import (PointSet, difference_counts, direction_class_ids,
                       norm_pair_counts, plane_norms)
from .groups import G1Element, Orthogonal2, enumerate_O2, scaled_apply_vec

__all__ = [
    "CountTable", "distance_histogram", "gamma_table", "gamma_fourier_check",
    "pair_transport_counts", "l2_directions", "directions_group_energy",
    "l2_scales", "nu", "nu_profile", "mu_table", "mu_energy",
    "mu_fourier_check", "eta_table", "eta_energy", "quotient_quadruples",
    "shift_count_table",
]

_PAIR_BLOCK = 4_000_000


@dataclass(frozen=True)
class CountTable:
    """Exact nonnegative integer counts over a small index space.

    kind is "field" (values indexed by t in F_q), "plane" (q x q, indexed
    by offsets z) or "plane4" (q x q x q x q).
    """

    ctx: FieldCtx
    kind: str
    values: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    def total(self) -> int:
        return int(self.values.sum(dtype=object))

    def energy(self) -> int:
        """Sum of squared entries, as an exact Python int."""
        return int((self.values.astype(object) ** 2).sum())


# ---------------------------------------------------------------------------
# pair shift counts
# ---------------------------------------------------------------------------

def shift_count_table(E: PointSet, image1: np.ndarray, image2: np.ndarray
                      ) -> np.ndarray:
    """Counts of z = b - s(a) over all pairs (a, b) of E^2, where
    (image1, image2) are the coordinates of s(a) for each member a."""
    ctx = E.ctx
    q = ctx.q
    x1, x2 = E.coords()
    out = np.zeros(q * q, dtype=np.int64)
    n = len(x1)
    if n == 0:
        return out.reshape(q, q)
    block = max(1, _PAIR_BLOCK // n)
    for i0 in range(0, n, block):
        z1 = ctx.sub_vec(x1[None, :], image1[i0:i0 + block, None])
        z2 = ctx.sub_vec(x2[None, :], image2[i0:i0 + block, None])
        out += np.bincount((z1 * q + z2).ravel(), minlength=q * q)
    return out.reshape(q, q)


# ---------------------------------------------------------------------------
# distance histogram
# ---------------------------------------------------------------------------

def distance_histogram(E: PointSet) -> CountTable:
    """r(t): ordered pairs of E at distance t; sums to |E|^2."""
    return CountTable(E.ctx, "field", norm_pair_counts(E), {"stat": "r"})


def _class_histogram(E: PointSet, cls: str) -> np.ndarray:
    """Distance histogram restricted to a square class of nonzero values:
    'A' nonzero squares, 'B' non-squares, 'all' every nonzero value."""
    ctx = E.ctx
    hist = norm_pair_counts(E).copy()
    hist[0] = 0
    if cls == "A":
        hist[~ctx.is_square_table] = 0
    elif cls == "B":
        hist[ctx.is_square_table] = 0
    elif cls != "all":
        raise SpecError(f"unknown pair class {cls!r}")
    return hist


# ---------------------------------------------------------------------------
# lambda transport
# ---------------------------------------------------------------------------

def gamma_table(E: PointSet, lam: FieldElement) -> CountTable:
    """Counts of pairs (a, b) in E^2 with lam * a + z = b, per offset z."""
    ctx = E.ctx
    x1, x2 = E.coords()
    row = ctx.mul_row(lam.index)
    values = shift_count_table(E, row[x1], row[x2])
    return CountTable(ctx, "plane", values, {"lambda": lam.index})


def gamma_fourier_check(E: PointSet, lam: FieldElement,
                        limits: Optional[RunLimits] = None) -> float:
    """Residual of the product form of the transport-table spectrum.

    The spectrum of the lam-transport table factors exactly as
    gamma_hat(xi) = q^2 * E_hat(xi) * E_hat(-lam * xi); the mirrored form
    E_hat(-xi) * E_hat(lam * xi) is its complex conjugate and agrees only
    in absolute value.  Returns the max pointwise residual of the exact
    (unconjugated) identity.
    """
    ctx = E.ctx
    q = ctx.q
    gh = dft_real_table(ctx, gamma_table(E, lam).values, limits)
    ehat = dft_indicator(E, limits).values.ravel()
    neg_lam = ctx.neg_idx(lam.index)
    row = ctx.mul_row(neg_lam)
    xi = np.arange(q * q, dtype=np.int64)
    perm = row[xi // q] * q + row[xi % q]
    rhs = q**2 * ehat * ehat[perm]
    return float(np.abs(gh.ravel() - rhs).max())


def pair_transport_counts(E: PointSet) -> np.ndarray:
    """n(lam) = quadruples (u, v, x, y) of E^4 with u - v = lam*(x - y),
    for every lam, as a (q,) array (degenerate tuples included)."""
    ctx = E.ctx
    q = ctx.q
    cnt = difference_counts(E)
    w = np.arange(q * q, dtype=np.int64)
    w1, w2 = w // q, w % q
    out = np.zeros(q, dtype=np.int64)
    for lam in range(q):
        row = ctx.mul_row(lam)
        out[lam] = int(np.dot(cnt, cnt[row[w1] * q + row[w2]]))
    return out


# ---------------------------------------------------------------------------
# direction and scale energies
# ---------------------------------------------------------------------------

def l2_directions(E: PointSet) -> int:
    """Quadruples (u, v, x, y) of E^4 with u - v parallel to x - y,
    all four differences nonzero (each tuple once)."""
    if len(E) == 0:
        raise SpecError("direction energy of the empty set")
    ctx = E.ctx
    cnt = difference_counts(E)
    ids = direction_class_ids(ctx)
    live = ids >= 0
    sums = np.bincount(ids[live], weights=cnt[live].astype(float),
                       minlength=ctx.q + 1)
    sums = np.rint(sums).astype(np.int64)
    return int((sums.astype(object) ** 2).sum())


def directions_group_energy(E: PointSet) -> int:
    """S(E) = sum over lam != 0 of the squared-table mass of the
    lam-transport counts; exceeds the direction energy by (q-1)|E|^2
    (the all-degenerate tuples, counted once per lam)."""
    if len(E) == 0:
        raise SpecError("group energy of the empty set")
    n = pair_transport_counts(E)
    return int(sum(int(v) for v in n[1:]))


def l2_scales(E: PointSet) -> tuple[int, int]:
    """Scale energies of E, as (per-lambda value, tuples-once value).

    The first sums, over lam != 0, the square of the lam-transport
    quadruple count (degenerate tuples included).  The second counts
    8-tuples satisfying both transport equations for at least one
    lam != 0, each 8-tuple once; it is derived from the same per-lambda
    counts by classifying quadruples (fully degenerate vs unique-lambda)
    and validated against tuple enumeration by the oracle suite.
    """
    if len(E) == 0:
        raise SpecError("scale energy of the empty set")
    n = pair_transport_counts(E)
    per_lambda = int(sum(int(v) ** 2 for v in n[1:]))
    w = len(E) ** 2
    singles = [int(v) - w for v in n[1:]]
    assert all(s >= 0 for s in singles)
    once = w**2 + 2 * w * sum(singles) + sum(s**2 for s in singles)
    return per_lambda, once


# ---------------------------------------------------------------------------
# class-restricted product profile
# ---------------------------------------------------------------------------

def nu_profile(E: PointSet, cls: str = "B") -> np.ndarray:
    """nu(lam) = pairs of class-restricted distance pairs whose product
    is lam, for every lam, via histogram convolution."""
    ctx = E.ctx
    hist = _class_histogram(E, cls)
    out = np.zeros(ctx.q, dtype=np.int64)
    for t1 in np.flatnonzero(hist):
        # products t1 * t2 over nonzero t2 form a permutation of F_q*
        out[ctx.mul_row(int(t1))] += hist[int(t1)] * hist
    return out


def nu(E: PointSet, lam: FieldElement, cls: str = "B") -> int:
    return int(nu_profile(E, cls)[lam.index])


# ---------------------------------------------------------------------------
# four-coordinate transport
# ---------------------------------------------------------------------------

def _factor_tables(E: PointSet, g: G1Element
                   ) -> tuple[np.ndarray, np.ndarray]:
    ctx = E.ctx
    x1, x2 = E.coords()
    im1 = scaled_apply_vec(ctx, g.r1.index, g.theta1, x1, x2)
    im2 = scaled_apply_vec(ctx, g.r2.index, g.theta2, x1, x2)
    return (shift_count_table(E, *im1), shift_count_table(E, *im2))


def mu_table(E: PointSet, g: G1Element,
             limits: Optional[RunLimits] = None) -> CountTable:
    """Counts of quadruples (x1, x2, x3, x4) of E^4 transported by g and
    offset z = (z1, z2), per z; the table factors over the two blocks."""
    limits = limits or RunLimits()
    ctx = E.ctx
    if ctx.q > limits.dim4_max_q:
        raise SizeLimitError(
            f"four-coordinate table for q={ctx.q} exceeds cap "
            f"{limits.dim4_max_q}")
    c1, c2 = _factor_tables(E, g)
    q = ctx.q
    values = np.multiply.outer(c1, c2).reshape(q, q, q, q)
    return CountTable(ctx, "plane4", values,
                      {"r1": g.r1.index, "r2": g.r2.index})


def mu_energy(E: PointSet, limits: Optional[RunLimits] = None) -> int:
    """Sum of squared four-coordinate transport counts over the whole
    block-scaled group and all offsets.

    Uses the block factorization: for each scaled rotation s the plane
    energy en(s) is computed once, and the group total is
    sum over r of (sum_theta en(r*theta)) * (sum_theta en(r^{-1}*theta)).
    """
    limits = limits or RunLimits()
    ctx = E.ctx
    if ctx.q > limits.g1_max_q:
        raise SizeLimitError(
            f"group energy for q={ctx.q} exceeds cap {limits.g1_max_q}")
    x1, x2 = E.coords()
    o2 = enumerate_O2(ctx)
    row_energy: dict[int, int] = {}
    for r in range(1, ctx.q):
        acc = 0
        for theta in o2:
            im = scaled_apply_vec(ctx, r, theta, x1, x2)
            tbl = shift_count_table(E, *im)
            acc += int((tbl.astype(object) ** 2).sum())
        row_energy[r] = acc
    return sum(row_energy[r] * row_energy[ctx.inv_idx(r)]
               for r in range(1, ctx.q))


def mu_fourier_check(E: PointSet, g: G1Element,
                     limits: Optional[RunLimits] = None) -> float:
    """Residual of the product form of the four-coordinate transport
    spectrum: mu_hat(xi) = q^4 * F_hat(xi) * F_hat(-g^T xi) with
    F = E x E (the mirrored argument form is the complex conjugate)."""
    limits = limits or RunLimits()
    ctx = E.ctx
    q = ctx.q
    tbl = mu_table(E, g, limits)
    mh = dft4_real_table(ctx, tbl.values, limits).reshape(q * q, q * q)
    ehat = dft_indicator(E, limits).values.ravel()

    def block_perm(r_idx: int, theta: Orthogonal2) -> np.ndarray:
        # frequency map xi -> -(r * theta^T) xi as a pid permutation
        tt = theta.transpose()
        xi = np.arange(q * q, dtype=np.int64)
        y1, y2 = scaled_apply_vec(ctx, r_idx, tt, xi // q, xi % q)
        return ctx.neg_table[y1] * q + ctx.neg_table[y2]

    p1 = block_perm(g.r1.index, g.theta1)
    p2 = block_perm(g.r2.index, g.theta2)
    fhat = np.multiply.outer(ehat, ehat)
    rhs = q**4 * fhat * fhat[np.ix_(p1, p2)]
    return float(np.abs(mh - rhs).max())


# ---------------------------------------------------------------------------
# scaled-rotation transport
# ---------------------------------------------------------------------------

def _sqrt_scale(ctx: FieldCtx, r: FieldElement) -> int:
    if r.index == 0 or not r.is_square():
        raise SpecError(f"parameter {r.index} must be a nonzero square")
    roots = ctx.sqrt_idx(r.index)
    assert roots is not None
    return roots[0]


def eta_table(E: PointSet, r: FieldElement, theta: Orthogonal2) -> CountTable:
    """Counts of pairs (u, v) of E^2 with u - sqrt(r) * theta(v) = z,
    per offset z, using the canonical root of r."""
    ctx = E.ctx
    t = _sqrt_scale(ctx, r)
    x1, x2 = E.coords()
    im = scaled_apply_vec(ctx, t, theta, x1, x2)
    return CountTable(ctx, "plane", shift_count_table(E, *im),
                      {"r": r.index, "sqrt_r": t})


def eta_energy(E: PointSet, r: FieldElement,
               sqrt_choice: int = 0) -> tuple[int, int]:
    """(mass, energy) of the scaled-rotation transport tables summed over
    all of O(2): sum eta and sum eta^2, exact.

    sqrt_choice picks the root of r (0 canonical, 1 the negation); the
    two give identical totals through the theta -> -theta symmetry,
    asserted by tests rather than assumed.
    """
    ctx = E.ctx
    t = _sqrt_scale(ctx, r)
    if sqrt_choice:
        t = ctx.neg_idx(t)
    x1, x2 = E.coords()
    mass = 0
    energy = 0
    for theta in enumerate_O2(ctx):
        im = scaled_apply_vec(ctx, t, theta, x1, x2)
        tbl = shift_count_table(E, *im)
        mass += int(tbl.sum(dtype=object))
        energy += int((tbl.astype(object) ** 2).sum())
    return mass, energy


# ---------------------------------------------------------------------------
# quotient quadruples
# ---------------------------------------------------------------------------

def quotient_quadruples(E: PointSet, r: FieldElement) -> tuple[int, int]:
    """Quadruples (a, b, c, d) of E^4 with ||a-b|| = r * ||c-d||:
    (total, with ||c-d|| != 0), via histogram convolution."""
    hist = norm_pair_counts(E)
    ctx = E.ctx
    row = ctx.mul_row(r.index)
    products = hist[row].astype(object) * hist.astype(object)
    total = int(products.sum())
    nonzero = int(products[1:].sum())
    return total, nonzero
