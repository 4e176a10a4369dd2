"""Character-sum spectra of indicator functions on the plane.

The transform convention is f_hat(xi) = q^{-d} sum_x f(x) chi(-x . xi)
with inversion f(x) = sum_xi f_hat(xi) chi(xi . x).  Plane transforms are
computed axis by axis through the dense q x q character matrix (the
direct double sum stays available as an oracle).  Everything here is
double-precision complex; exact integer counting lives in the counting
module so floats never gate a combinatorial claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import RunLimits
from .errors import SizeLimitError, SpecError
from .field import FieldCtx
from .geometry import Point, PointSet, plane_norms

__all__ = [
    "SpectralTable", "char_matrix", "dft_real_table", "dft_indicator",
    "dft_product_indicator", "dft4_real_table", "inverse_check",
    "spherical_averages", "spherical_average", "spherical_max_ratio",
    "line_energy", "lambda_fourth_moment", "l_pair", "frequency_line_pids",
]


@dataclass(frozen=True)
class SpectralTable:
    """Complex spectrum over F_q^dim, dim 2 or 4.

    values has shape (q, q) or (q, q, q, q); source_size is the mass of
    the transformed indicator, so values[0, ...] == source_size / q^dim.
    """

    ctx: FieldCtx
    dim: int
    values: np.ndarray
    source_size: int


def char_matrix(ctx: FieldCtx) -> np.ndarray:
    """C[a, b] = chi(-a*b); symmetric, unitary up to a factor q."""
    def build():
        mt = ctx.mul_table()
        c = np.conj(ctx.chi_table)[mt]
        c.setflags(write=False)
        return c
    return ctx.memo("char_matrix", build)


def _check_dft_q(ctx: FieldCtx, limits: Optional[RunLimits]) -> None:
    cap = (limits or RunLimits()).dft_max_q
    if ctx.q > cap:
        raise SizeLimitError(f"dense spectrum for q={ctx.q} exceeds cap {cap}")


def dft_real_table(ctx: FieldCtx, table: np.ndarray,
                   limits: Optional[RunLimits] = None) -> np.ndarray:
    """Transform of an arbitrary real table on the plane, axis by axis."""
    _check_dft_q(ctx, limits)
    c = char_matrix(ctx)
    return c @ (table.astype(np.float64) @ c) / ctx.q**2


def dft_indicator(E: PointSet, limits: Optional[RunLimits] = None
                  ) -> SpectralTable:
    """Spectrum of the indicator of E."""
    values = dft_real_table(E.ctx, E.indicator_grid(), limits)
    return SpectralTable(E.ctx, 2, values, len(E))


def dft_product_indicator(E: PointSet, limits: Optional[RunLimits] = None
                          ) -> SpectralTable:
    """Spectrum of the indicator of E x E on the four-coordinate grid.

    The product structure makes this the outer product of the plane
    spectrum with itself; the direct four-fold sum is kept as an oracle.
    """
    limits = limits or RunLimits()
    if E.ctx.q > limits.dim4_max_q:
        raise SizeLimitError(
            f"four-coordinate spectrum for q={E.ctx.q} exceeds cap "
            f"{limits.dim4_max_q}")
    t2 = dft_indicator(E, limits).values
    q = E.ctx.q
    values = np.multiply.outer(t2, t2).reshape(q, q, q, q)
    return SpectralTable(E.ctx, 4, values, len(E) ** 2)


def dft4_real_table(ctx: FieldCtx, table: np.ndarray,
                    limits: Optional[RunLimits] = None) -> np.ndarray:
    """Transform of a real table on the four-coordinate grid."""
    limits = limits or RunLimits()
    if ctx.q > limits.dim4_max_q:
        raise SizeLimitError(
            f"four-coordinate spectrum for q={ctx.q} exceeds cap "
            f"{limits.dim4_max_q}")
    c = char_matrix(ctx)
    out = table.astype(np.complex128)
    for axis in range(4):
        out = np.tensordot(c, out, axes=([1], [axis]))
        out = np.moveaxis(out, 0, axis)
    return out / ctx.q**4


def inverse_check(table: SpectralTable, E: PointSet) -> float:
    """Max pointwise error of the reconstruction sum against the source."""
    ctx = table.ctx
    cc = np.conj(char_matrix(ctx))
    if table.dim == 2:
        recon = cc @ table.values @ cc
        target = E.indicator_grid().astype(np.float64)
    elif table.dim == 4:
        recon = table.values
        for axis in range(4):
            recon = np.moveaxis(np.tensordot(cc, recon, axes=([1], [axis])),
                                0, axis)
        ind = E.indicator_grid().astype(np.float64)
        q = ctx.q
        target = np.multiply.outer(ind, ind).reshape(q, q, q, q)
    else:
        raise SpecError(f"unsupported dim {table.dim}")
    return float(np.abs(recon - target).max())


# ---------------------------------------------------------------------------
# spherical averages
# ---------------------------------------------------------------------------

def spherical_averages(E: PointSet, limits: Optional[RunLimits] = None
                       ) -> np.ndarray:
    """sum_{||eta|| = t} |E_hat(eta)|^2 for every t, as a (q,) array."""
    power = np.abs(dft_indicator(E, limits).values.ravel()) ** 2
    return np.bincount(plane_norms(E.ctx), weights=power, minlength=E.ctx.q)


def spherical_average(E: PointSet, t, limits: Optional[RunLimits] = None
                      ) -> float:
    t_idx = t if isinstance(t, int) else t.index
    return float(spherical_averages(E, limits)[t_idx])


def spherical_max_ratio(E: PointSet, limits: Optional[RunLimits] = None
                        ) -> float:
    """max over t != 0 of the spherical average, scaled by q^3 / |E|^{3/2}."""
    if len(E) == 0:
        raise SpecError("spherical ratio of the empty set")
    sa = spherical_averages(E, limits)
    return float(sa[1:].max() * E.ctx.q**3 / len(E) ** 1.5)


# ---------------------------------------------------------------------------
# line statistics
# ---------------------------------------------------------------------------

def frequency_line_pids(ctx: FieldCtx, xi: Point) -> np.ndarray:
    """pids of the q frequencies t * xi, t over F_q (xi != 0)."""
    if xi.is_zero():
        raise SpecError("line through a zero frequency is not unique")
    q = ctx.q
    t = np.arange(q, dtype=np.int64)
    return (ctx.mul_row(xi.x1.index)[t] * q + ctx.mul_row(xi.x2.index)[t])


def _member_dots(E: PointSet, xi: Point) -> np.ndarray:
    """Counts of xi . x over members of E, as a (q,) integer array."""
    ctx = E.ctx
    x1, x2 = E.coords()
    d = ctx.add_vec(ctx.mul_row(xi.x1.index)[x1], ctx.mul_row(xi.x2.index)[x2])
    return np.bincount(d, minlength=ctx.q)


def line_energy(E: PointSet, xi: Point, limits: Optional[RunLimits] = None
                ) -> tuple[float, float]:
    """Energy of the spectrum on the line through xi, two ways.

    Returns (spectral, combinatorial): the spectral sum over the line
    of |E_hat|^2, and q^{-3} times the number of pairs of E whose
    difference is orthogonal to xi.  The two agree exactly.
    """
    values = dft_indicator(E, limits).values.ravel()
    spectral = float((np.abs(values[frequency_line_pids(E.ctx, xi)]) ** 2).sum())
    counts = _member_dots(E, xi)
    pairs = int((counts.astype(object) ** 2).sum())
    return spectral, pairs / E.ctx.q**3


def lambda_fourth_moment(E: PointSet, m: Point,
                         limits: Optional[RunLimits] = None
                         ) -> tuple[float, float]:
    """sum over lambda of |E_hat(lambda*m)|^4, two ways.

    Combinatorial side: q^{-7} times the number of quadruples
    (x, y, z, w) of E with m . (x + y - z - w) = 0.
    """
    ctx = E.ctx
    values = dft_indicator(E, limits).values.ravel()
    spectral = float((np.abs(values[frequency_line_pids(ctx, m)]) ** 4).sum())
    counts = _member_dots(E, m).astype(np.int64)
    # distribution of m.x + m.y over pairs, then match z+w against x+y
    idx = np.arange(ctx.q, dtype=np.int64)
    sums = ctx.add_vec(idx[:, None], idx[None, :]).ravel()
    pair_counts = np.bincount(
        sums, weights=(counts[:, None] * counts[None, :]).ravel().astype(float),
        minlength=ctx.q)
    pair_counts = np.rint(pair_counts).astype(np.int64)
    quads = int((pair_counts.astype(object) ** 2).sum())
    return spectral, quads / ctx.q**7


def l_pair(E: PointSet, xi1: Point, xi2: Point,
           limits: Optional[RunLimits] = None) -> tuple[float, float]:
    """sum over lambda of |E_hat(lambda xi1)|^2 |E_hat(lambda xi2)|^2,
    plus its ratio against |E|^3 / q^6."""
    ctx = E.ctx
    values = dft_indicator(E, limits).values.ravel()
    p1 = np.abs(values[frequency_line_pids(ctx, xi1)]) ** 2
    p2 = np.abs(values[frequency_line_pids(ctx, xi2)]) ** 2
    total = float((p1 * p2).sum())
    return total, total / (len(E) ** 3 / ctx.q**6)
