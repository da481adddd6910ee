"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .instance import DirectionSet


def check_points(X) -> np.ndarray:
    """2-D finite float array with at least one row and column."""
    return check_array(X, dtype=float, ensure_2d=True, ensure_all_finite=True)


def check_directions(directions, n_features: int) -> DirectionSet:
    """Direction set for ``n_features``-dimensional points; ``None`` means the
    coordinate axes."""
    if directions is None:
        return DirectionSet(np.eye(n_features))
    U = check_array(directions, dtype=float, ensure_2d=True, ensure_all_finite=True)
    if U.shape[1] != n_features:
        raise ValueError(f"directions have {U.shape[1]} coordinates, X has {n_features} features")
    return DirectionSet(U)


def check_binary_labels(y, n_samples: int) -> np.ndarray:
    y = np.asarray(y).ravel()
    if y.shape != (n_samples,):
        raise ValueError(f"y has {y.size} entries, expected {n_samples}")
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError("labels must be 0 or 1")
    return y.astype(np.uint8)


def check_fraction(name: str, value) -> float:
    if value is None:
        raise ValueError(f"{name} is required for this method")
    value = float(value)
    if not 0 < value < 1:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")
    return value
