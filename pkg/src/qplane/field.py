"""Exact arithmetic in F_q for odd prime powers q = p^k.

An element is a canonical integer index in [0, q): its base-p digits are
the polynomial-basis coefficients, constant term least significant, so
the prime subfield occupies indexes 0..p-1.  A FieldCtx precomputes the
per-element tables (negation, inverse, square roots, quadratic-residue
flags, absolute trace, additive character) at construction; everything
afterwards is a table lookup or cheap digit arithmetic, scalar or
vectorized over numpy index arrays.  Contexts are immutable and safe to
share across workers.
"""

from __future__ import annotations

import math
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import SpecError

__all__ = ["FieldCtx", "FieldElement", "field_create", "is_prime"]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient tuples, ascending powers)
# ---------------------------------------------------------------------------

def _poly_trim(c: Sequence[int]) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> tuple[int, ...]:
    a = list(_poly_trim(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        shift = len(a) - 1 - dm
        factor = (a[-1] * inv_lead) % p
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        a = list(_poly_trim(a))
    return tuple(a)


def _poly_is_irreducible(m: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    m = _poly_trim(m)
    deg = len(m) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for idx in range(p**d):
            cand = _digits(idx, p, d) + (1,)
            if not _poly_mod(m, cand, p):
                return False
    return True


def _digits(index: int, p: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        out.append(index % p)
        index //= p
    return tuple(out)


def _index_of(digits: Sequence[int], p: int) -> int:
    out = 0
    for d in reversed(digits):
        out = out * p + d
    return out


def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible of degree k with the smallest canonical index."""
    for idx in range(p**k):
        cand = _digits(idx, p, k) + (1,)
        if _poly_is_irreducible(cand, p):
            return cand
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# field context
# ---------------------------------------------------------------------------

class FieldCtx:
    """Immutable context for F_q, q = p^k with p an odd prime."""

    def __init__(self, p: int, k: int = 1,
                 modulus: Optional[Sequence[int]] = None,
                 max_q: int = 10_000):
        if p == 2:
            raise SpecError("characteristic 2 is not supported: the "
                            "quadratic form degenerates (every element is "
                            "a square)")
        if not is_prime(p):
            raise SpecError(f"p={p} is not prime")
        if k < 1:
            raise SpecError(f"extension degree k={k} must be >= 1")
        q = p**k
        if q > max_q:
            raise SpecError(f"q={q} exceeds the configured limit {max_q}")
        self.p = p
        self.k = k
        self.q = q

        if modulus is None:
            self.modulus = _smallest_irreducible(p, k)
        else:
            mod = tuple(int(c) % p for c in modulus)
            if len(mod) != k + 1 or mod[-1] != 1:
                raise SpecError("modulus must be monic of degree k "
                                "(k+1 coefficients, ascending powers)")
            if not _poly_is_irreducible(mod, p):
                raise SpecError(f"modulus {mod} is reducible over F_{p}")
            self.modulus = mod
        self.key = (p, k, self.modulus)

        self._build_tables()
        self._lazy: dict = {}

    # -- construction -------------------------------------------------

    def _mul_poly_idx(self, a: int, b: int) -> int:
        """Reference multiplication via polynomial reduction (slow path)."""
        prod = _poly_mul(_digits(a, self.p, self.k),
                         _digits(b, self.p, self.k), self.p)
        return _index_of(_poly_mod(prod, self.modulus, self.p), self.p)

    def _build_tables(self) -> None:
        p, k, q = self.p, self.k, self.q

        idx = np.arange(q, dtype=np.int64)
        neg = np.zeros(q, dtype=np.int64)
        pw = 1
        for _ in range(k):
            neg += ((-(idx // pw % p)) % p) * pw
            pw *= p
        self.neg_table = neg

        # discrete log/exp from the first generator in index order
        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        for g in range(1, q):
            acc, order = 1, 0
            seen = []
            while True:
                seen.append(acc)
                acc = self._mul_poly_idx(acc, g)
                order += 1
                if acc == 1:
                    break
            if order == q - 1:
                self.generator = g
                exp[:] = seen
                log[exp] = np.arange(q - 1)
                break
        else:  # pragma: no cover - F_q* is always cyclic
            raise AssertionError("no multiplicative generator found")
        self.exp_table = exp
        self.log_table = log

        inv = np.zeros(q, dtype=np.int64)
        inv[exp] = exp[(-np.arange(q - 1)) % (q - 1)]
        self.inv_table = inv

        # square roots: first (lowest) t hitting t^2 fixes the pair {t, -t}
        is_sq = np.zeros(q, dtype=bool)
        sqrt_canon = np.full(q, -1, dtype=np.int64)
        for t in range(q):
            s = self.exp_table[(2 * self.log_table[t]) % (q - 1)] if t else 0
            if not is_sq[s]:
                is_sq[s] = True
                sqrt_canon[s] = min(t, int(neg[t]))
        self.is_square_table = is_sq
        self.sqrt_table = sqrt_canon
        assert int(is_sq.sum()) == (q + 1) // 2

        # absolute trace via iterated Frobenius, then the character table
        frob = np.zeros(q, dtype=np.int64)
        frob[1:] = exp[(log[idx[1:]] * p) % (q - 1)]
        tr = np.arange(q, dtype=np.int64)
        acc = tr.copy()
        for _ in range(k - 1):
            acc = frob[acc]
            tr = self.add_vec(tr, acc)
        assert np.all(tr < p), "trace must land in the prime subfield"
        self.trace_table = tr
        self.chi_table = np.exp(2j * np.pi * tr / p)

        for arr in (self.neg_table, self.exp_table, self.log_table,
                    self.inv_table, self.sqrt_table, self.trace_table,
                    self.chi_table):
            arr.setflags(write=False)
        self.is_square_table.setflags(write=False)

    def memo(self, name: str, builder):
        """Idempotent per-context cache for derived tables."""
        if name not in self._lazy:
            self._lazy[name] = builder()
        return self._lazy[name]

    # -- scalar index arithmetic ---------------------------------------

    def add_idx(self, a: int, b: int) -> int:
        p, out, pw = self.p, 0, 1
        for _ in range(self.k):
            out += ((a // pw + b // pw) % p) * pw
            pw *= p
        return out

    def neg_idx(self, a: int) -> int:
        return int(self.neg_table[a])

    def sub_idx(self, a: int, b: int) -> int:
        return self.add_idx(a, int(self.neg_table[b]))

    def mul_idx(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[(self.log_table[a] + self.log_table[b])
                                  % (self.q - 1)])

    def inv_idx(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return int(self.inv_table[a])

    def pow_idx(self, a: int, n: int) -> int:
        if a == 0:
            if n == 0:
                return 1
            if n < 0:
                raise ZeroDivisionError("negative power of 0")
            return 0
        return int(self.exp_table[(int(self.log_table[a]) * n) % (self.q - 1)])

    # -- vectorized index arithmetic ------------------------------------

    def add_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        p = self.p
        if self.k == 1:
            return (a + b) % p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        pw = 1
        for _ in range(self.k):
            out += ((a // pw + b // pw) % p) * pw
            pw *= p
        return out

    def sub_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.add_vec(a, self.neg_table[b])

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(a, b)
        out = np.zeros(a.shape, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        out[nz] = self.exp_table[(self.log_table[a[nz]]
                                  + self.log_table[b[nz]]) % (self.q - 1)]
        return out

    def mul_row(self, lam: int) -> np.ndarray:
        """Index map a -> lam*a as a length-q array (cached per lam)."""
        rows = self.memo("mul_rows", dict)
        if lam not in rows:
            row = self.mul_vec(np.full(self.q, lam, dtype=np.int64),
                               np.arange(self.q, dtype=np.int64))
            row.setflags(write=False)
            rows[lam] = row
        return rows[lam]

    def mul_table(self) -> np.ndarray:
        """Dense q x q multiplication table (only for table-scale q)."""
        def build():
            if self.q > 2048:
                raise SpecError(f"dense multiplication table for q={self.q} "
                                "refused (limit 2048)")
            idx = np.arange(self.q, dtype=np.int64)
            tbl = self.mul_vec(idx[:, None], idx[None, :])
            tbl.setflags(write=False)
            return tbl
        return self.memo("mul_table", build)

    def square_vec(self, a: np.ndarray) -> np.ndarray:
        return self.mul_vec(a, a)

    # -- element access -------------------------------------------------

    def element(self, index: int) -> "FieldElement":
        if not 0 <= index < self.q:
            raise SpecError(f"index {index} out of range for q={self.q}")
        return FieldElement(self, index)

    def from_int(self, value: int) -> "FieldElement":
        """Image of an ordinary integer (lands in the prime subfield)."""
        return FieldElement(self, value % self.p)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> Iterator["FieldElement"]:
        return (FieldElement(self, i) for i in range(self.q))

    def squares(self) -> list[int]:
        """Indexes of the square elements, 0 included."""
        return [int(i) for i in np.flatnonzero(self.is_square_table)]

    def nonzero_squares(self) -> list[int]:
        return [i for i in self.squares() if i != 0]

    # -- element-level predicates ----------------------------------------

    def is_square_idx(self, a: int) -> bool:
        return bool(self.is_square_table[a])

    def sqrt_idx(self, a: int) -> Optional[tuple[int, int]]:
        t = int(self.sqrt_table[a])
        if t < 0:
            return None
        return t, int(self.neg_table[t])

    def trace_idx(self, a: int) -> int:
        return int(self.trace_table[a])

    def chi_idx(self, a: int) -> complex:
        return complex(self.chi_table[a])

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, k={self.k}, q={self.q})"


def field_create(p: int, k: int = 1,
                 modulus: Optional[Sequence[int]] = None,
                 max_q: int = 10_000) -> FieldCtx:
    """Build F_{p^k}.

    If no modulus is given, the monic irreducible of degree k with the
    smallest canonical index is chosen, so repeated runs over the same
    (p, k) are bit-reproducible.
    """
    return FieldCtx(p, k, modulus=modulus, max_q=max_q)


class FieldElement:
    """A field element, identified by its canonical index."""

    __slots__ = ("ctx", "index")

    def __init__(self, ctx: FieldCtx, index: int):
        self.ctx = ctx
        self.index = int(index)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.ctx.key != self.ctx.key:
                raise SpecError("elements from different fields")
            return other
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.ctx, self.ctx.add_idx(self.index, o.index))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.ctx, self.ctx.sub_idx(self.index, o.index))

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg_idx(self.index))

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement(self.ctx, self.ctx.mul_idx(self.index, o.index))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * FieldElement(self.ctx, self.ctx.inv_idx(o.index))

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __pow__(self, n: int):
        return FieldElement(self.ctx, self.ctx.pow_idx(self.index, n))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv_idx(self.index))

    def is_square(self) -> bool:
        return self.ctx.is_square_idx(self.index)

    def sqrt(self) -> Optional[tuple["FieldElement", "FieldElement"]]:
        """Both roots (canonical one first), or None for a non-square."""
        roots = self.ctx.sqrt_idx(self.index)
        if roots is None:
            return None
        return FieldElement(self.ctx, roots[0]), FieldElement(self.ctx, roots[1])

    def trace(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.trace_idx(self.index))

    def chi(self) -> complex:
        return self.ctx.chi_idx(self.index)

    def __bool__(self) -> bool:
        return self.index != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.index == other % self.ctx.p and self.index < self.ctx.p
        return (isinstance(other, FieldElement)
                and self.ctx.key == other.ctx.key
                and self.index == other.index)

    def __hash__(self) -> int:
        return hash((self.ctx.key, self.index))

    def __repr__(self) -> str:
        return f"F{self.ctx.q}({self.index})"
