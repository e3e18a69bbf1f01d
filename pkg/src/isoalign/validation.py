"""Small input-validation helpers used across the public API."""

from __future__ import annotations

import numpy as np


def check_matrix(X, name="X", dtype=np.float64):
    """Coerce to a 2-d float array and reject non-finite entries."""
    X = np.asarray(X, dtype=dtype)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_paired_matrices(X, Y):
    X = check_matrix(X, "X")
    Y = check_matrix(Y, "Y")
    if X.shape != Y.shape:
        raise ValueError(
            f"X and Y must have identical shapes, got {X.shape} and {Y.shape}"
        )
    return X, Y


def check_positive(value, name):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def check_space(space):
    """Duck-typed check that `space` looks like an EmbeddingSpace."""
    for attr in ("words", "matrix"):
        if not hasattr(space, attr):
            raise TypeError(f"expected an EmbeddingSpace, got {type(space).__name__}")
    return space
