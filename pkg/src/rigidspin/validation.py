"""Input validation helpers shared by the estimators and the loaders."""

from __future__ import annotations

import numpy as np

from .exceptions import NotRotation
from .so3 import is_rotation


def check_rotation_sequence(seq, tol=1e-9, min_length=2) -> np.ndarray:
    R = np.asarray(seq, dtype=float)
    if R.ndim != 3 or R.shape[1:] != (3, 3):
        raise ValueError(f"a rotation sequence must have shape (L, 3, 3), got {R.shape}")
    if R.shape[0] < min_length:
        raise ValueError(f"rotation sequence needs at least {min_length} frames, got {R.shape[0]}")
    if not is_rotation(R, tol):
        raise NotRotation("sequence contains a matrix that is not a rotation")
    return R


def check_rotation_sequences(X, tol=1e-9, min_length=2) -> list[np.ndarray]:
    """Accept an ``(N, L, 3, 3)`` array or a list of ``(L_k, 3, 3)`` arrays."""
    if isinstance(X, np.ndarray):
        if X.ndim == 3:
            X = X[None]
        if X.ndim != 4:
            raise ValueError(f"expected shape (N, L, 3, 3), got {X.shape}")
        seqs = list(X)
    else:
        seqs = list(X)
    if not seqs:
        raise ValueError("no sequences given")
    return [check_rotation_sequence(s, tol, min_length) for s in seqs]


def check_positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive, got {value}")
    return float(value)
