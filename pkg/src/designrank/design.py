"""Design profiles, rank lower bounds, and the rank certificate pipeline.

A matrix is a ``(q, k, t)``-design when each row has at most ``q`` nonzeros,
each column at least ``k``, and any two columns share at most ``t`` rows.
:func:`gram_certify` turns that combinatorial information into a rank lower
bound: replicate rows to get a pattern with Property-S, balance it with
:func:`~designrank.scaling.scale_l2`, lift the scaling back, and read the
bound off the diagonal dominance of the Gram matrix.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_count, check_positive
from .matrix import RATIONAL, ZeroPattern, as_scalar_matrix, pattern_of, property_s_from_blocks
from .rank import exact_rank_rational, numerical_rank
from .scaling import DEFAULT_MAX_ITERS, scale_l2

__all__ = [
    "DesignProfile",
    "RankCertificate",
    "Replication",
    "design_profile",
    "rank_lower_bound",
    "rank_lower_bound_avg",
    "build_replicated",
    "diag_dominant_rank_bound",
    "gram_certify",
    "formula_certify",
    "DesignRankCertifier",
]


@dataclass(frozen=True)
class DesignProfile:
    q: int
    k: int
    t: int
    sum_sq_intersections: int

    def as_tuple(self):
        return self.q, self.k, self.t


def design_profile(P):
    """Measure ``(q, k, t)`` and the sum of squared column-pair intersections.

    The sum runs over ordered pairs ``j1 != j2``.
    """
    P = pattern_of(P)
    D = P.to_dense()
    G = D.T @ D
    off = G - np.diag(np.diag(G))
    q = max(len(r) for r in P.row_supports)
    k = min(len(c) for c in P.col_supports)
    t = int(off.max()) if P.n > 1 else 0
    return DesignProfile(q, k, t, int((off.astype(object) ** 2).sum()))


def rank_lower_bound(n, q, k, t):
    """``n - (q t n / 2k)^2``, clamped at zero."""
    if k < 1:
        raise ValueError("rank bound is undefined for k = 0")
    return max(0.0, n - (q * t * n / (2 * k)) ** 2)


def rank_lower_bound_avg(n, q, k, sum_sq):
    """``n - (q / 2k)^2 * sum_sq``: the bound with ``n^2 t^2`` replaced by the
    measured sum of squared intersections; clamped at zero."""
    if k < 1:
        raise ValueError("rank bound is undefined for k = 0")
    return max(0.0, n - (q / (2 * k)) ** 2 * sum_sq)


def diag_dominant_rank_bound(n, L, ell):
    """Rank lower bound ``n / (1 + n (ell/L)^2)`` for a hermitian matrix with
    diagonal >= ``L`` and off-diagonal moduli <= ``ell``."""
    if not 0 < ell < L:
        raise ValueError(f"need 0 < ell < L, got ell={ell}, L={L}")
    return n / (1 + n * (ell / L) ** 2)


def _gram_bound(n, L, ell):
    # same inequality as diag_dominant_rank_bound, valid for any ell >= 0, L > 0
    if L <= 0:
        return 0.0
    return n / (1 + n * (ell / L) ** 2)


class Replication(NamedTuple):
    pattern: ZeroPattern
    multiplicities: tuple
    source_rows: tuple


def build_replicated(P, k):
    """Stack ``k`` blocks of ``n`` rows, each block having a nonzero diagonal.

    In every step, column ``j`` (in increasing order) takes the lowest-index
    row that still has an unmarked nonzero in column ``j``, and that entry is
    marked. Each row is reused at most ``q`` times because every use marks
    one of its nonzeros.
    """
    P = pattern_of(P)
    k = check_count(k, "k", 1)
    short = [j for j, c in enumerate(P.col_supports) if len(c) < k]
    if short:
        raise ValueError(f"columns {short[:5]} have fewer than k={k} nonzeros")
    # column j's s-th unmarked row under the lowest-index rule is its s-th smallest row
    ordered = [sorted(c) for c in P.col_supports]
    source = tuple(ordered[j][s] for s in range(k) for j in range(P.n))
    mult = [0] * P.m
    for i in source:
        mult[i] += 1
    B = P.select_rows(source)
    verdict = property_s_from_blocks(B, [P.n] * k)
    if not verdict:
        raise AssertionError(f"replicated pattern fails Property-S in block {verdict.block}")
    return Replication(B, tuple(mult), source)


@dataclass(frozen=True)
class RankCertificate:
    """A rank lower bound together with the quantities it was computed from.

    For the gram pipeline, ``bound == n / (1 + n (gram_offdiag_max / gram_diag_min)^2)``
    where both Gram figures already include ``rounding_slack``.
    """

    n: int
    m: int
    bound: Optional[float]
    route: str
    eps_used: float
    gram_diag_min: Optional[float] = None
    gram_offdiag_max: Optional[float] = None
    exact_rank: Optional[int] = None
    converged: bool = True
    predicted_diag_min: Optional[float] = None
    predicted_offdiag_max: Optional[float] = None
    rounding_slack: Optional[float] = None
    scaling_iterations: Optional[int] = None
    achieved_eps: Optional[float] = None
    formula_bound: Optional[float] = None
    averaged_bound: Optional[float] = None

    @property
    def integer_bound(self):
        return None if self.bound is None else math.ceil(self.bound)

    def to_dict(self):
        return asdict(self)


def _check_design_input(A):
    M = as_scalar_matrix(A)
    P = pattern_of(M)
    if any(len(r) == 0 for r in P.row_supports):
        raise ValueError("A has an all-zero row; the certificate needs every row nonzero")
    prof = design_profile(P)
    if prof.k < 1:
        raise ValueError("A has an all-zero column (k = 0); no rank bound applies")
    return M, P, prof


def _exact_rank(M):
    return exact_rank_rational(M).value if M.domain == RATIONAL else numerical_rank(M).value


def formula_certify(A, exact_rank=False):
    """Certificate from the measured profile alone (no scaling)."""
    M, P, prof = _check_design_input(A)
    bound = rank_lower_bound(P.n, prof.q, prof.k, prof.t)
    return RankCertificate(
        n=P.n, m=P.m, bound=bound, route="formula", eps_used=0.0,
        exact_rank=_exact_rank(M) if exact_rank else None,
        formula_bound=bound,
        averaged_bound=rank_lower_bound_avg(P.n, prof.q, prof.k, prof.sum_sq_intersections),
    )


def gram_certify(A, eps=1e-9, max_iters=DEFAULT_MAX_ITERS, exact_rank=False, return_scaling=False):
    """Run the replicate / scale / lift / Gram pipeline and certify ``rank(A) >= bound``.

    The bound uses the measured diagonal minimum ``L`` and off-diagonal
    maximum ``ell`` of ``M = A'^* A'``, widened by a floating-point rounding
    allowance, so it is sound for the scaling actually found whatever ``eps``
    was reached. If the scaling does not converge the certificate carries no
    bound.
    """
    check_positive(eps, "eps")
    M, P, prof = _check_design_input(A)
    m, n = P.m, P.n
    rep = build_replicated(P, prof.k)
    X = np.asarray(M.to_complex().entries, dtype=complex)
    B = X[list(rep.source_rows)]
    res = scale_l2(B, eps=eps, max_iters=max_iters)
    formula = rank_lower_bound(n, prof.q, prof.k, prof.t)
    averaged = rank_lower_bound_avg(n, prof.q, prof.k, prof.sum_sq_intersections)
    common = dict(
        n=n, m=m, route="gram-pipeline", eps_used=float(eps),
        predicted_diag_min=(prof.k - eps) / prof.q,
        predicted_offdiag_max=prof.t * (1 + eps) / 2,
        scaling_iterations=res.iterations, achieved_eps=res.achieved_eps,
        formula_bound=formula, averaged_bound=averaged,
        exact_rank=_exact_rank(M) if exact_rank else None,
    )
    if not res.converged:
        cert = RankCertificate(bound=None, converged=False, **common)
        return (cert, None) if return_scaling else cert

    gamma = res.gamma
    row_coef = np.zeros(m)
    for b, i in enumerate(rep.source_rows):
        row_coef[i] = max(row_coef[i], res.rho[b])
    for i in np.flatnonzero(row_coef == 0):
        row_coef[i] = 1.0 / np.sqrt(np.sum(np.abs(X[i]) ** 2 * gamma ** 2))
    Ap = row_coef[:, None] * X * gamma[None, :]
    G = Ap.conj().T @ Ap
    diag = np.real(np.diag(G))
    off = np.abs(G - np.diag(np.diag(G)))
    # each Gram entry is a sum of m products of a few rounded factors
    slack = 2.0 * (m + 10) * np.finfo(float).eps * float(diag.max())
    L = float(diag.min()) - slack
    ell = (float(off.max()) if n > 1 else 0.0) + slack
    cert = RankCertificate(
        bound=_gram_bound(n, L, ell), gram_diag_min=L, gram_offdiag_max=ell,
        rounding_slack=slack, converged=True, **common,
    )
    return (cert, (row_coef, gamma, Ap)) if return_scaling else cert


class DesignRankCertifier(BaseEstimator):
    """Estimator front end for :func:`gram_certify`.

    ``fit`` computes the certificate and the lifted scaling; ``transform``
    applies that scaling to a matrix of the fitted shape.

    Attributes
    ----------
    certificate_ : RankCertificate
    profile_ : DesignProfile
    bound_ : float or None
    row_coef_, col_coef_ : ndarray or None
    """

    def __init__(self, eps=1e-9, max_iters=DEFAULT_MAX_ITERS, exact_rank=False):
        self.eps = eps
        self.max_iters = max_iters
        self.exact_rank = exact_rank

    def fit(self, X, y=None):
        cert, scaling = gram_certify(X, self.eps, self.max_iters, self.exact_rank, return_scaling=True)
        self.certificate_ = cert
        self.profile_ = design_profile(X)
        self.bound_ = cert.bound
        self.row_coef_, self.col_coef_ = (scaling[0], scaling[1]) if scaling else (None, None)
        self.n_features_in_ = cert.n
        return self

    def transform(self, X):
        check_is_fitted(self, "certificate_")
        if self.row_coef_ is None:
            raise ValueError("scaling did not converge; nothing to apply")
        X = np.asarray(as_scalar_matrix(X).to_complex().entries, dtype=complex)
        if X.shape != (self.row_coef_.shape[0], self.col_coef_.shape[0]):
            raise ValueError(f"X has shape {X.shape}, expected {(self.row_coef_.shape[0], self.col_coef_.shape[0])}")
        return self.row_coef_[:, None] * X * self.col_coef_[None, :]
