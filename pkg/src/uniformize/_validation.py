"""Input validation helpers used by the estimator, metrics, and IO layers."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError


def as_vector(x, name: str = "samples") -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting non-finite entries."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise InvalidInputError(f"{name} contains a non-finite value at row {bad[0]}")
    return arr


def as_matrix(x, name: str = "X", min_rows: int = 1) -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting non-finite entries.

    1-D input is treated as a single column.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_rows:
        raise InvalidInputError(
            f"{name} needs at least {min_rows} rows, got {arr.shape[0]}"
        )
    if arr.shape[1] < 1:
        raise InvalidInputError(f"{name} needs at least one column")
    if not np.isfinite(arr).all():
        rows, cols = np.nonzero(~np.isfinite(arr))
        raise InvalidInputError(
            f"{name} contains a non-finite value at row {rows[0]}, column {cols[0]}"
        )
    return arr


def as_factor_matrix(y, name: str = "factors") -> np.ndarray:
    """Coerce factor labels to a 2-D int64 array of non-negative codes."""
    arr = np.asarray(y)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        flt = np.asarray(arr, dtype=np.float64)
        if not np.isfinite(flt).all() or not np.array_equal(flt, np.floor(flt)):
            raise InvalidInputError(f"{name} must contain integer class labels")
        arr = flt.astype(np.int64)
    else:
        arr = arr.astype(np.int64)
    if (arr < 0).any():
        rows, cols = np.nonzero(arr < 0)
        raise InvalidInputError(
            f"{name} contains a negative label at row {rows[0]}, column {cols[0]}"
        )
    return arr


def check_same_rows(a: np.ndarray, b: np.ndarray, a_name: str, b_name: str) -> None:
    if a.shape[0] != b.shape[0]:
        raise InvalidInputError(
            f"{a_name} has {a.shape[0]} rows but {b_name} has {b.shape[0]}"
        )
