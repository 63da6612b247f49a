"""Scalar-generic matrices, zero patterns and the Property-S check.

Three scalar domains are supported: complex floating point, exact rationals
(:class:`fractions.Fraction`, always in lowest terms) and prime fields
(canonical residues ``0 <= x < p``). Matrices are thin immutable wrappers
around numpy arrays; most functions in the package also accept plain
array-likes and infer the domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._validation import check_2d, check_count, to_fraction

__all__ = [
    "ScalarDomain",
    "COMPLEX",
    "RATIONAL",
    "ScalarMatrix",
    "ZeroPattern",
    "PropertySVerdict",
    "as_scalar_matrix",
    "pattern_of",
    "property_s_check",
    "property_s_from_blocks",
]


def _is_prime(p):
    from sympy import isprime

    return isprime(p)


@dataclass(frozen=True)
class ScalarDomain:
    """One of ``complex``, ``rational`` or ``prime`` (with modulus ``p``)."""

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("complex", "rational", "prime"):
            raise ValueError(f"unknown scalar domain {self.kind!r}")
        if self.kind == "prime":
            if self.p is None or self.p < 2 or not _is_prime(int(self.p)):
                raise ValueError(f"prime-field modulus must be a prime >= 2, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"domain {self.kind!r} takes no modulus")

    @classmethod
    def prime(cls, p):
        return cls("prime", int(p))

    @property
    def machine_epsilon(self):
        """Unit roundoff for the floating domain, ``None`` for exact domains."""
        return float(np.finfo(np.float64).eps) if self.kind == "complex" else None

    def __str__(self):
        return f"prime:{self.p}" if self.kind == "prime" else self.kind

    @classmethod
    def parse(cls, token):
        if token.startswith("prime:"):
            return cls.prime(int(token.split(":", 1)[1]))
        return cls(token)


COMPLEX = ScalarDomain("complex")
RATIONAL = ScalarDomain("rational")


def _coerce_entries(arr, domain):
    if domain.kind == "complex":
        out = np.array(arr, dtype=complex)
        if not np.all(np.isfinite(out)):
            raise ValueError("complex matrix contains non-finite entries")
        return out
    if domain.kind == "rational":
        out = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(arr):
            out[idx] = to_fraction(x)
        return out
    p = domain.p
    dtype = np.int64 if p < 2**31 else object
    out = np.empty(arr.shape, dtype=dtype)
    for idx, x in np.ndenumerate(arr):
        x = to_fraction(x)
        # p/q is read as p * q^{-1} in the field
        if x.denominator % p == 0:
            raise ZeroDivisionError(f"denominator of {x} vanishes mod {p}")
        out[idx] = (x.numerator * pow(x.denominator, -1, p)) % p
    return out


def _infer_domain(arr):
    if arr.dtype == object:
        if all(isinstance(x, (int, Fraction)) for x in arr.flat):
            return RATIONAL
        return COMPLEX
    if np.issubdtype(arr.dtype, np.integer) or arr.dtype == bool:
        return RATIONAL
    return COMPLEX


@dataclass(frozen=True, eq=False)
class ScalarMatrix:
    """An ``m x n`` matrix whose entries all live in one scalar domain."""

    entries: np.ndarray
    domain: ScalarDomain = RATIONAL

    def __post_init__(self):
        arr = self.entries
        if not isinstance(arr, np.ndarray):
            arr = np.array(arr, dtype=object)
        arr = _coerce_entries(check_2d(arr, "entries", dtype=arr.dtype), self.domain)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def m(self):
        return self.entries.shape[0]

    @property
    def n(self):
        return self.entries.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return (self.domain == other.domain and self.shape == other.shape
                and bool(np.all(self.entries == other.entries)))

    def __hash__(self):
        return hash((self.domain, self.shape, tuple(self.entries.flat)))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def to_complex(self):
        """Floating image of the matrix (prime-field residues are taken as integers)."""
        if self.domain.kind == "complex":
            return self
        return ScalarMatrix(np.array([[complex(x) for x in row] for row in self.entries]), COMPLEX)

    def __repr__(self):
        return f"ScalarMatrix(m={self.m}, n={self.n}, domain={self.domain})"


def as_scalar_matrix(A, domain=None):
    """Coerce ``A`` (ScalarMatrix or array-like) to a :class:`ScalarMatrix`."""
    if isinstance(A, ScalarMatrix):
        if domain is None or domain == A.domain:
            return A
        return ScalarMatrix(A.entries, domain)
    if isinstance(A, np.ndarray):
        arr = A
    else:
        rows = [list(r) for r in A]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("matrix rows must be non-empty and of equal length")
        arr = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                arr[i, j] = x
        if domain is None and all(isinstance(x, (int, Fraction, np.integer)) for x in arr.flat):
            domain = RATIONAL
    arr = check_2d(arr, "A", dtype=arr.dtype)
    return ScalarMatrix(arr, domain or _infer_domain(arr))


@dataclass(frozen=True)
class ZeroPattern:
    """Row and column supports of an ``m x n`` matrix (0-based indices)."""

    m: int
    n: int
    row_supports: tuple
    col_supports: tuple = field(default=None)

    def __post_init__(self):
        rows = tuple(frozenset(int(j) for j in r) for r in self.row_supports)
        if len(rows) != self.m:
            raise ValueError(f"expected {self.m} row supports, got {len(rows)}")
        for r in rows:
            if any(j < 0 or j >= self.n for j in r):
                raise ValueError("row support index out of range")
        cols = [set() for _ in range(self.n)]
        for i, r in enumerate(rows):
            for j in r:
                cols[j].add(i)
        cols = tuple(frozenset(c) for c in cols)
        if self.col_supports is not None:
            given = tuple(frozenset(c) for c in self.col_supports)
            if given != cols:
                raise ValueError("row and column supports are inconsistent")
        object.__setattr__(self, "row_supports", rows)
        object.__setattr__(self, "col_supports", cols)

    @classmethod
    def from_dense(cls, mask):
        mask = np.asarray(mask, dtype=bool)
        m, n = mask.shape
        return cls(m, n, tuple(np.flatnonzero(row).tolist() for row in mask))

    def to_dense(self):
        """0/1 integer matrix with ones exactly on the support."""
        out = np.zeros((self.m, self.n), dtype=np.int64)
        for i, r in enumerate(self.row_supports):
            out[i, list(r)] = 1
        return out

    def transpose(self):
        return ZeroPattern(self.n, self.m, self.col_supports)

    def select_rows(self, rows):
        return ZeroPattern(len(rows), self.n, tuple(self.row_supports[i] for i in rows))

    @property
    def nnz(self):
        return sum(len(r) for r in self.row_supports)


def pattern_of(A):
    """Zero pattern of a matrix; accepts a ScalarMatrix, array-like or ZeroPattern."""
    if isinstance(A, ZeroPattern):
        return A
    M = as_scalar_matrix(A)
    return ZeroPattern.from_dense(M.entries != 0)


@dataclass(frozen=True)
class PropertySVerdict:
    """Outcome of a Property-S check.

    ``status`` is ``"holds"``, ``"violated"`` or ``"unknown"``. On violation
    ``witness`` is ``(rows, cols)`` spanning an all-zero submatrix with
    ``a/m + b/n > 1``.
    """

    status: str
    witness: Optional[tuple] = None
    method: str = "exact"
    block: Optional[int] = None

    @property
    def holds(self):
        return {"holds": True, "violated": False}.get(self.status)

    def __bool__(self):
        return self.status == "holds"


def _violates(a, b, m, n):
    return a * n + b * m > m * n


def _exact_search(P):
    """Enumerate subsets of the smaller side with bound-based pruning."""
    swapped = P.n < P.m
    Q = P.transpose() if swapped else P
    S, O = Q.m, Q.n
    full = (1 << O) - 1
    zero_masks = []
    for r in Q.row_supports:
        nz = 0
        for j in r:
            nz |= 1 << j
        zero_masks.append(full & ~nz)

    chosen = []

    def dfs(start, a, zmask):
        for r in range(start, S):
            z = zmask & zero_masks[r]
            b = z.bit_count()
            if b == 0:
                continue
            chosen.append(r)
            if _violates(a + 1, b, S, O):
                return z
            # extensions only shrink the zero set; stop if even all remaining rows cannot violate
            if _violates(a + 1 + (S - r - 1), b, S, O):
                hit = dfs(r + 1, a + 1, z)
                if hit is not None:
                    return hit
            chosen.pop()
        return None

    z = dfs(0, 0, full)
    if z is None:
        return None
    rows = tuple(chosen)
    cols = tuple(j for j in range(O) if z >> j & 1)
    return (cols, rows) if swapped else (rows, cols)


def _flow_search(P):
    """Max-flow criterion: Property-S holds iff rows (supply n each) can ship
    m*n units to columns (demand m each) along the support. On failure the
    source side of a minimum cut gives the zero rectangle."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import breadth_first_order, maximum_flow

    m, n = P.m, P.n
    s, t = 0, m + n + 1
    src, dst, cap = [], [], []
    for i, r in enumerate(P.row_supports):
        src.append(s), dst.append(1 + i), cap.append(n)
        for j in r:
            src.append(1 + i), dst.append(1 + m + j), cap.append(m * n)
    for j in range(n):
        src.append(1 + m + j), dst.append(t), cap.append(m)
    size = m + n + 2
    C = csr_matrix((np.array(cap, dtype=np.int64), (src, dst)), shape=(size, size))
    res = maximum_flow(C, s, t)
    if res.flow_value >= m * n:
        return None
    R = (C - res.flow).tocsr()
    R.data[R.data < 0] = 0
    R.eliminate_zeros()
    reach = set(breadth_first_order(R, s, directed=True, return_predecessors=False).tolist())
    rows = tuple(i for i in range(m) if 1 + i in reach)
    cols = tuple(j for j in range(n) if 1 + m + j not in reach)
    return rows, cols


def _greedy_search(P):
    m, n = P.m, P.n
    for seed in range(m):
        rows = [seed]
        zero = set(range(n)) - P.row_supports[seed]
        while zero:
            if _violates(len(rows), len(zero), m, n):
                return tuple(sorted(rows)), tuple(sorted(zero))
            best = max(
                (i for i in range(m) if i not in rows),
                key=lambda i: (len(zero - P.row_supports[i]), -i),
                default=None,
            )
            if best is None:
                break
            rows.append(best)
            zero -= P.row_supports[best]
    return None


def property_s_check(P, exact_limit=20, mode="exact"):
    """Decide Property-S for a zero pattern (or matrix).

    ``mode="exact"`` enumerates subsets of the smaller side and refuses when
    ``min(m, n) > exact_limit``. ``mode="flow"`` decides the same question
    with a max-flow/min-cut computation and extracts the witness from the cut.
    ``mode="heuristic"`` runs a greedy search and answers ``"unknown"`` when it
    finds nothing.
    """
    P = pattern_of(P)
    check_count(exact_limit, "exact_limit")
    if mode == "exact":
        if min(P.m, P.n) > exact_limit:
            raise ValueError(
                f"exact Property-S check needs min(m, n) <= {exact_limit}, got {P.m}x{P.n}"
            )
        witness = _exact_search(P)
    elif mode == "flow":
        witness = _flow_search(P)
    elif mode == "heuristic":
        witness = _greedy_search(P)
        if witness is None:
            return PropertySVerdict("unknown", method=mode)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if witness is None:
        return PropertySVerdict("holds", method=mode)
    return PropertySVerdict("violated", witness, method=mode)


def property_s_from_blocks(P, block_heights: Sequence[int], exact_limit=12):
    """Certify Property-S of a row-concatenation from per-block checks.

    Each block is checked on its own, by enumeration when
    ``min(height, n) <= exact_limit`` and by max-flow otherwise; if all
    blocks hold, so does the concatenation.
    """
    P = pattern_of(P)
    heights = [check_count(h, "block height", 1) for h in block_heights]
    if sum(heights) != P.m:
        raise ValueError(f"block heights sum to {sum(heights)}, pattern has {P.m} rows")
    start = 0
    for b, h in enumerate(heights):
        rows = list(range(start, start + h))
        block = P.select_rows(rows)
        mode = "exact" if min(h, P.n) <= exact_limit else "flow"
        v = property_s_check(block, exact_limit=exact_limit, mode=mode)
        if not v:
            brow, bcol = v.witness
            return PropertySVerdict("violated", (tuple(start + i for i in brow), bcol),
                                    method="blocks", block=b)
        start += h
    return PropertySVerdict("holds", method="blocks")

