"""Input checks shared by the estimators and the functional core."""

from __future__ import annotations

import numpy as np

CODE_DTYPE = np.int32


def check_instances(X, name: str, n_cols: int | None = None) -> np.ndarray:
    """Coerce to a 2d integer code matrix; empty inputs are allowed."""
    X = np.asarray(X)
    if X.size == 0:
        X = X.reshape(0, n_cols if n_cols is not None else (X.shape[1] if X.ndim == 2 else 0))
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2d instance matrix, got ndim={X.ndim}")
    if not np.issubdtype(X.dtype, np.integer):
        raise ValueError(f"{name} must hold interned integer codes, got dtype {X.dtype}")
    if n_cols is not None and X.shape[0] and X.shape[1] != n_cols:
        raise ValueError(f"{name} has arity {X.shape[1]}, expected {n_cols}")
    return np.ascontiguousarray(X, dtype=CODE_DTYPE)


def check_matching_arity(X: np.ndarray, m: int) -> None:
    if X.shape[1] != m:
        raise ValueError(f"instances have arity {X.shape[1]}, model expects {m}")


def resolve_classes(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map labels to {-1,+1}; returns (classes, y_pm) with classes[1] positive.

    Labels already in {-1,+1} keep their meaning even if only one value is
    present; any other labeling must contain exactly two distinct values, and
    the larger one (by sort order) is taken as positive.
    """
    classes = np.unique(y)
    if set(classes.tolist()) <= {-1, 1}:
        classes = np.array([-1, 1])
    elif len(classes) != 2:
        raise ValueError(
            f"y must contain exactly two classes, got {len(classes)}: {classes!r}"
        )
    y_pm = np.where(y == classes[1], 1, -1).astype(np.int8)
    return classes, y_pm
