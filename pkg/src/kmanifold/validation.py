"""Input validation helpers.

All array-accepting entry points funnel through these so that shape and
finiteness errors surface with a consistent message instead of a numpy
traceback deep inside a solve.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ShapeMismatch


def as_matrix(a, name="matrix"):
    """Coerce to a 2-D float64 array with finite entries and size >= 1x1."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeMismatch(f"{name} must be at least 1x1, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def as_vector(v, name="vector", length=None):
    """Coerce to a 1-D float64 array, optionally checking its length."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeMismatch(f"{name} must be 1-D, got ndim={v.ndim}")
    if length is not None and v.shape[0] != length:
        raise ShapeMismatch(f"{name} must have length {length}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def as_columns(q, n_rows, name="input"):
    """Accept a vector of length ``n_rows`` or an ``n_rows x k`` matrix.

    Returns ``(array_2d, was_vector)`` so callers can hand back a result in
    the caller's shape.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.ndim == 1:
        if q.shape[0] != n_rows:
            raise ShapeMismatch(f"{name} must have length {n_rows}, got {q.shape[0]}")
        return q[:, None], True
    if q.ndim == 2:
        if q.shape[0] != n_rows:
            raise ShapeMismatch(f"{name} must have {n_rows} rows, got {q.shape[0]}")
        return q, False
    raise ShapeMismatch(f"{name} must be 1-D or 2-D, got ndim={q.ndim}")


def check_square(a, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got {a.shape}")


def check_symmetric(a, name="matrix", rtol=1e-12):
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a - a.T).max() > rtol * scale:
        raise ValueError(f"{name} is not symmetric within relative tolerance {rtol}")
