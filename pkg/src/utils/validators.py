"""
Input validation helpers for point clouds, query points and radii
"""

import math
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DimensionError, ValidationError

ArrayLike = Union[Sequence[float], Sequence[Sequence[float]], np.ndarray]


def is_finite_array(values: np.ndarray) -> bool:
    """Return True when every entry is a finite float (no NaN, no inf)."""
    return bool(np.all(np.isfinite(values)))


def as_point_array(points: ArrayLike, d: int) -> np.ndarray:
    """
    Coerce coordinates to a read-only float64 array of shape (N, d).

    An empty input becomes an array of shape (0, d).
    """
    array = np.asarray(points, dtype=np.float64)
    if array.size == 0:
        return np.zeros((0, d), dtype=np.float64)
    if array.ndim == 1 and d == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2 or array.shape[1] != d:
        raise DimensionError(f"Expected points of shape (N, {d}), got {array.shape}")
    if not is_finite_array(array):
        raise ValidationError("Point coordinates must be finite (NaN or inf found)")
    return array


def as_query_point(x: ArrayLike, d: int) -> np.ndarray:
    """Coerce a single query point to a float64 vector of length d."""
    point = np.asarray(x, dtype=np.float64).reshape(-1)
    if point.shape[0] != d:
        raise DimensionError(f"Query point has {point.shape[0]} coordinates, expected {d}")
    if not is_finite_array(point):
        raise ValidationError(f"Query point has a NaN or infinite coordinate: {point.tolist()}")
    return point


def validate_radius(r: float, allow_zero: bool = True, name: str = "r") -> float:
    """
    Validate a ball radius.

    Returns:
        float: the radius as a Python float
    """
    value = float(r)
    if math.isnan(value):
        raise ValidationError(f"{name} must not be NaN")
    if allow_zero and value < 0:
        raise ValidationError(f"{name} must be >= 0, got {value}")
    if not allow_zero and value <= 0:
        raise ValidationError(f"{name} must be > 0, got {value}")
    return value


def validate_dimensions(n: int, d: int) -> None:
    """Check 1 <= n <= d."""
    if int(d) < 1:
        raise DimensionError(f"Ambient dimension d must be >= 1, got {d}")
    if int(n) < 1:
        raise DimensionError(f"Intrinsic dimension n must be >= 1, got {n}")
    if int(n) > int(d):
        raise DimensionError(f"Intrinsic dimension n={n} exceeds ambient dimension d={d}")


def parse_point(text: str, d: Optional[int] = None) -> np.ndarray:
    """
    Parse a comma separated coordinate string such as "0.5,0.25".

    Args:
        text: coordinates separated by commas
        d: expected dimension, checked when given
    """
    try:
        coords = [float(part) for part in text.split(',') if part.strip()]
    except ValueError as e:
        raise ValidationError(f"Cannot parse point '{text}': {e}") from e
    if d is not None:
        return as_query_point(coords, d)
    return np.asarray(coords, dtype=np.float64)


def parse_float_list(text: str) -> list:
    """Parse "0.1,0.05,0.025" into a list of floats."""
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError as e:
        raise ValidationError(f"Cannot parse number list '{text}': {e}") from e
