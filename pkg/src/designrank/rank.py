"""Rank backends: SVD threshold, fraction-free rational elimination, and
elimination over a prime field."""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Optional

import numpy as np

from .matrix import COMPLEX, RATIONAL, ScalarDomain, ScalarMatrix, as_scalar_matrix

__all__ = ["RankResult", "numerical_rank", "exact_rank_rational", "rank_mod_p", "rank"]


@dataclass(frozen=True)
class RankResult:
    value: int
    method: str
    tolerance: Optional[float] = None
    singular_values: Optional[tuple] = None

    def __int__(self):
        return self.value


def numerical_rank(A, tol_factor=1.0):
    """Count singular values above ``tol_factor * max(m, n) * s_max * eps``."""
    M = as_scalar_matrix(A)
    if M.domain != COMPLEX:
        M = M.to_complex()
    X = np.asarray(M.entries, dtype=complex)
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix contains non-finite entries")
    s = np.linalg.svd(X, compute_uv=False)
    smax = s[0] if s.size else 0.0
    tol = float(tol_factor) * max(X.shape) * smax * np.finfo(float).eps
    return RankResult(int(np.sum(s > tol)), "svd-threshold", float(tol), tuple(float(x) for x in s))


def _integer_rows(M):
    """Clear denominators row by row; row scaling does not change rank."""
    out = np.empty(M.shape, dtype=object)
    for i, row in enumerate(M):
        d = lcm(*(x.denominator for x in row))
        out[i] = [x.numerator * (d // x.denominator) for x in row]
    return out


def _bareiss_rank(M):
    M = M.copy()
    m, n = M.shape
    r = 0
    prev = 1
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(M[r:, c] != 0)
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            M[[r, p]] = M[[p, r]]
        piv = M[r, c]
        if r + 1 < m and c + 1 < n:
            below = M[r + 1:, c + 1:]
            # exact division: every entry is a minor of the input
            M[r + 1:, c + 1:] = (piv * below - np.outer(M[r + 1:, c], M[r, c + 1:])) // prev
        M[r + 1:, c] = 0
        prev = piv
        r += 1
    return r


def exact_rank_rational(A):
    """Exact rank via fraction-free (Bareiss) elimination, first-nonzero pivoting."""
    if isinstance(A, ScalarMatrix) and A.domain != RATIONAL:
        raise ValueError(f"expected a rational matrix, got domain {A.domain}")
    M = as_scalar_matrix(A, RATIONAL)
    return RankResult(_bareiss_rank(_integer_rows(M.entries)), "fraction-free-elimination")


def rank_mod_p(A, p=None):
    """Exact rank over GF(p) by Gaussian elimination on canonical residues."""
    if p is not None:
        domain = ScalarDomain.prime(p)
        M = as_scalar_matrix(getattr(A, "entries", A), domain)
    else:
        M = as_scalar_matrix(A)
        if M.domain.kind != "prime":
            raise ValueError("rank_mod_p needs a prime-field matrix or an explicit modulus")
    p = M.domain.p
    X = np.array(M.entries, dtype=M.entries.dtype)
    m, n = X.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(X[r:, c] != 0)
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            X[[r, piv]] = X[[piv, r]]
        inv = pow(int(X[r, c]), -1, p)
        X[r] = (X[r] * inv) % p
        f = X[r + 1:, c].copy()
        if f.size:
            X[r + 1:] = (X[r + 1:] - np.outer(f, X[r]) % p) % p
        r += 1
    return RankResult(r, "modular-elimination")


def rank(A, tol_factor=1.0, exact=True):
    """Dispatch on the scalar domain; ``exact=False`` forces the SVD route."""
    M = as_scalar_matrix(A)
    if not exact or M.domain == COMPLEX:
        return numerical_rank(M, tol_factor)
    if M.domain.kind == "prime":
        return rank_mod_p(M)
    return exact_rank_rational(M)
