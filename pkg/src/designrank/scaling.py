"""Sinkhorn-style matrix scaling.

:func:`sinkhorn_l1` alternates between normalising rows to sum 1 and columns
to sum ``m/n``. :func:`scale_l2` applies it to the squared moduli of a
complex matrix and takes square roots of the coefficients at the end.
:class:`SinkhornScaler` wraps both behind the scikit-learn transformer API.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_2d, check_count, check_finite, check_nonnegative_real, check_positive
from .matrix import ScalarMatrix

__all__ = ["ScalingResult", "sinkhorn_l1", "scale_l2", "balance_deviation", "SinkhornScaler"]

DEFAULT_MAX_ITERS = 100_000


@dataclass(frozen=True, eq=False)
class ScalingResult:
    """Row coefficients ``rho``, column coefficients ``gamma`` and the scaled
    matrix ``scaled[i, j] = rho[i] * gamma[j] * A[i, j]``.

    ``iterations`` counts normalisation half-steps (one row pass or one column
    pass each). ``achieved_eps`` is the balance deviation of ``scaled``.
    """

    rho: np.ndarray
    gamma: np.ndarray
    scaled: np.ndarray
    iterations: int
    achieved_eps: float
    converged: bool


def _as_array(A):
    X = np.asarray(A.entries if isinstance(A, ScalarMatrix) else A)
    if X.dtype == object:
        X = X.astype(complex)
    return X


def balance_deviation(B):
    """``max(max_i(rowsum_i - 1), max_j(m/n - colsum_j), 0)`` for a non-negative ``B``."""
    m, n = B.shape
    return max(float(np.max(B.sum(axis=1) - 1.0)), float(np.max(m / n - B.sum(axis=0))), 0.0)


def sinkhorn_l1(A, eps=1e-9, max_iters=DEFAULT_MAX_ITERS):
    """Scale a non-negative matrix towards row sums <= 1 + eps and column sums >= m/n - eps.

    Stops at the first half-step whose deviation is at most ``eps``. If that
    never happens within ``max_iters`` half-steps the best iterate seen is
    returned with ``converged=False``; for matrices without Property-S this is
    the expected outcome.
    """
    X = _as_array(A)
    if np.iscomplexobj(X):
        if np.any(X.imag != 0):
            raise ValueError("A must be real")
        X = X.real
    A = check_nonnegative_real(X, "A")
    check_positive(eps, "eps")
    max_iters = check_count(max_iters, "max_iters", 1)
    m, n = A.shape
    if np.any(A.sum(axis=1) == 0):
        raise ValueError("A has an all-zero row; no positive scaling exists")
    if np.any(A.sum(axis=0) == 0):
        raise ValueError("A has an all-zero column; no positive scaling exists")
    target = m / n

    rho = np.ones(m)
    gamma = np.ones(n)
    S = A.copy()
    best = (np.inf, rho.copy(), gamma.copy(), 0)
    it = 0
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        while it < max_iters:
            if it % 2 == 0:
                r = S.sum(axis=1)
                rho /= r
                S /= r[:, None]
            else:
                c = S.sum(axis=0)
                f = target / c
                gamma *= f
                S *= f[None, :]
            it += 1
            if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(gamma))
                    and np.all(rho > 0) and np.all(gamma > 0)):
                break
            dev = balance_deviation(S)
            if dev < best[0]:
                best = (dev, rho.copy(), gamma.copy(), it)
            if dev <= eps:
                break

    _, rho, gamma, _ = best
    scaled = rho[:, None] * A * gamma[None, :]
    # report the deviation of the recomputed product, not of the running iterate
    achieved = balance_deviation(scaled)
    return ScalingResult(rho, gamma, scaled, it, achieved, achieved <= eps)


def scale_l2(A, eps=1e-9, max_iters=DEFAULT_MAX_ITERS):
    """Scale a complex matrix so squared row norms are <= 1 + eps and squared
    column norms are >= m/n - eps.

    Works on ``|a_ij|^2`` and returns the square roots of the resulting
    coefficients.
    """
    X = check_finite(check_2d(_as_array(A), "A", dtype=complex), "A")
    res = sinkhorn_l1(np.abs(X) ** 2, eps=eps, max_iters=max_iters)
    rho = np.sqrt(res.rho)
    gamma = np.sqrt(res.gamma)
    scaled = rho[:, None] * X * gamma[None, :]
    achieved = balance_deviation(np.abs(scaled) ** 2)
    return ScalingResult(rho, gamma, scaled, res.iterations, achieved, achieved <= eps)


class SinkhornScaler(TransformerMixin, BaseEstimator):
    """Learn row and column scaling coefficients for a fixed matrix.

    Parameters
    ----------
    norm : {"l1", "l2"}
        ``"l1"`` balances entry sums of a non-negative matrix, ``"l2"``
        balances squared moduli of a complex one.
    eps : float
        Target balance deviation.
    max_iters : int
        Cap on normalisation half-steps.

    Attributes
    ----------
    row_coef_, col_coef_ : ndarray
    n_iter_ : int
    achieved_eps_ : float
    converged_ : bool
    """

    def __init__(self, norm="l2", eps=1e-9, max_iters=DEFAULT_MAX_ITERS):
        self.norm = norm
        self.eps = eps
        self.max_iters = max_iters

    def fit(self, X, y=None):
        if self.norm == "l1":
            res = sinkhorn_l1(X, self.eps, self.max_iters)
        elif self.norm == "l2":
            res = scale_l2(X, self.eps, self.max_iters)
        else:
            raise ValueError(f"norm must be 'l1' or 'l2', got {self.norm!r}")
        self.row_coef_ = res.rho
        self.col_coef_ = res.gamma
        self.n_iter_ = res.iterations
        self.achieved_eps_ = res.achieved_eps
        self.converged_ = res.converged
        self.n_features_in_ = res.gamma.shape[0]
        return self

    def transform(self, X):
        """Apply the learned coefficients; ``X`` must have the fitted shape."""
        check_is_fitted(self, "row_coef_")
        X = check_2d(_as_array(X), "X", dtype=complex if self.norm == "l2" else float)
        if X.shape != (self.row_coef_.shape[0], self.col_coef_.shape[0]):
            raise ValueError(
                f"X has shape {X.shape}, scaler was fitted on "
                f"{(self.row_coef_.shape[0], self.col_coef_.shape[0])}"
            )
        return self.row_coef_[:, None] * X * self.col_coef_[None, :]
