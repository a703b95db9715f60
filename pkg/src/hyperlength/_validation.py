"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np


def check_polyline_vertices(vertices, min_vertices: int = 2) -> np.ndarray:
    z = np.array(vertices, dtype=complex)
    if z.ndim != 1:
        raise ValueError(f"vertices must be one-dimensional, got shape {z.shape}")
    if len(z) < min_vertices:
        raise ValueError(f"need at least {min_vertices} vertices, got {len(z)}")
    if not np.all(np.isfinite(z)):
        raise ValueError("vertices must be finite")
    if np.any(np.roll(z, -1) == z):
        raise ValueError("consecutive vertices must be distinct")
    return z


def check_positive(value, name: str, *, strict: bool = True) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value) or (value <= 0 if strict else value < 0):
        raise ValueError(f"{name} must be {'positive' if strict else 'nonnegative'}, got {value!r}")
    return value


def check_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be at least {minimum}, got {value!r}")
    return int(value)


def check_unit_interval(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)
