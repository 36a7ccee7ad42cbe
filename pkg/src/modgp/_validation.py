"""Small input-checking helpers shared by the numerical modules."""

import numbers

import numpy as np

from .exceptions import DomainError


def as_float_array(x, name="x"):
    """Return ``x`` as a float64 array (0-d allowed), rejecting NaN/inf."""
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite real, got {value!r}")
    return float(value)


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_in_interval(x, lo, hi, name="t"):
    arr = np.asarray(x)
    if np.any(arr < lo) or np.any(arr > hi):
        raise DomainError(f"{name} outside domain [{lo}, {hi}]")


def check_times(X):
    """Coerce estimator input to a 1-D float array of time points.

    Accepts shape ``(n,)`` or ``(n, 1)`` like scikit-learn transformers with a
    single feature.
    """
    arr = as_float_array(X, "X")
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected 1-D time points or a single column, got shape {arr.shape}")
    return arr


def scalar_or_array(result, like):
    return float(result) if np.ndim(like) == 0 else result
