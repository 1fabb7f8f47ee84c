"""Input validation helpers shared by the estimator and evaluation APIs."""

from __future__ import annotations

import numbers

import numpy as np

from .colors import Srgb8


def check_srgb8(value) -> Srgb8:
    """Coerce a 3-sequence of integers in [0, 255] to Srgb8."""
    r, g, b = value
    channels = []
    for name, v in zip("rgb", (r, g, b)):
        if isinstance(v, bool) or not isinstance(v, numbers.Integral):
            raise ValueError(f"channel {name} must be an integer, got {v!r}")
        v = int(v)
        if not 0 <= v <= 255:
            raise ValueError(f"channel {name} out of range [0, 255]: {v}")
        channels.append(v)
    return Srgb8(*channels)


def check_pixel_matrix(X) -> np.ndarray:
    """Validate an (N, 3) matrix of finite pixel coordinates."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"expected an (N, 3) pixel matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("pixel matrix must contain at least one row")
    if not np.all(np.isfinite(arr)):
        raise ValueError("pixel matrix contains non-finite values")
    return arr


def check_paired_vectors(x, y, min_len: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Validate two equal-length finite 1-D vectors."""
    xa = np.asarray(x, dtype=np.float64).ravel()
    ya = np.asarray(y, dtype=np.float64).ravel()
    if xa.shape != ya.shape:
        raise ValueError(f"length mismatch: {xa.shape[0]} vs {ya.shape[0]}")
    if xa.shape[0] < min_len:
        raise ValueError(f"need at least {min_len} observations, got {xa.shape[0]}")
    if not (np.all(np.isfinite(xa)) and np.all(np.isfinite(ya))):
        raise ValueError("vectors contain non-finite values")
    return xa, ya
