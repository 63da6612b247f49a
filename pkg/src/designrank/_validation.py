"""Input validation helpers shared by the estimators and the functional API."""

from __future__ import annotations

import numbers
from fractions import Fraction

import numpy as np


def check_positive(value, name):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def check_count(value, name, minimum=0):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_2d(X, name="X", dtype=None):
    """Return ``X`` as a 2-D numpy array, rejecting empty and ragged input."""
    arr = np.asarray(X, dtype=dtype)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column, got shape {arr.shape}")
    return arr


def check_finite(arr, name="X"):
    if arr.dtype != object and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_nonnegative_real(X, name="X"):
    arr = check_finite(check_2d(X, name, dtype=float), name)
    if np.any(arr < 0):
        raise ValueError(f"{name} must be entrywise non-negative")
    return arr


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (numbers.Integral, str)):
        return Fraction(x)
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, numbers.Real):
        if not np.isfinite(x):
            raise ValueError(f"cannot convert non-finite value {x!r} to a rational")
        return Fraction(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")
