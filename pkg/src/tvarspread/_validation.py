"""Input validation helpers shared by the estimators and the CLI."""

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import InvalidArgumentError


def check_series(y, name="y", min_length=2):
    """Return ``y`` as a finite 1-d float array of at least ``min_length`` values."""
    arr = check_array(np.asarray(y, dtype=float).reshape(-1, 1), ensure_all_finite=True, ensure_min_samples=1)
    arr = arr.ravel()
    if arr.size < min_length:
        raise InvalidArgumentError(f"{name} needs at least {min_length} observations, got {arr.size}")
    return arr


def check_prices(X):
    """Two aligned price columns as an ``(n, 2)`` finite float array."""
    X = check_array(X, dtype=float, ensure_all_finite=True)
    if X.shape[1] != 2:
        raise InvalidArgumentError(f"expected two price columns, got {X.shape[1]}")
    return X


def check_unit_interval(value, name):
    if not 0.0 < value < 1.0:
        raise InvalidArgumentError(f"{name} must lie in (0, 1), got {value!r}")
    return float(value)
