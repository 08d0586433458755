"""
Discrete measures - weighted point clouds approximating Radon measures in R^d
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from src.utils.errors import (
    DimensionError,
    LengthMismatchError,
    NegativeWeightError,
    ValidationError,
)
from src.utils.validators import (
    as_point_array,
    as_query_point,
    is_finite_array,
    validate_dimensions,
    validate_radius,
)
from .geometry import bounding_box, support_diameter
from .index import BallQueryIndex, RadialProfile

logger = logging.getLogger(__name__)


def _read_only(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


class DiscreteMeasure:
    """
    Immutable weighted point cloud with a ball-query index.

    Attributes:
        points: (N, d) read-only coordinates
        weights: (N,) read-only nonnegative masses
        n: intrinsic dimension used for density normalization
        d: ambient dimension
        h: sampling resolution
        total_mass: sum of weights in index order
        metadata: generator bookkeeping (JSON-serializable)
    """

    def __init__(self, points: np.ndarray, weights: np.ndarray, n: int, d: int, h: float,
                 metadata: Optional[Dict[str, Any]] = None):
        self.points = _read_only(points)
        self.weights = _read_only(weights)
        self.n = int(n)
        self.d = int(d)
        self.h = float(h)
        self.metadata: Dict[str, Any] = dict(metadata or {})
        self.total_mass = float(np.sum(self.weights)) if len(self.weights) else 0.0
        self.index = BallQueryIndex(self.points, self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __repr__(self) -> str:
        generator = self.metadata.get('generator', 'custom')
        return (f"DiscreteMeasure(N={len(self)}, n={self.n}, d={self.d}, h={self.h:g}, "
                f"total_mass={self.total_mass:g}, generator={generator})")

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    @cached_property
    def diameter(self) -> float:
        """diam(supp mu)."""
        return support_diameter(self.points)

    @cached_property
    def bounds(self):
        return bounding_box(self.points)

    def ball_mass(self, x, r: float) -> float:
        return ball_mass(self, x, r)

    def ball_masses(self, x, radii) -> np.ndarray:
        return ball_masses(self, x, radii)

    def radial_profile(self, x, r_max: Optional[float] = None) -> RadialProfile:
        """Cumulative mass around x for batches of radii."""
        point = as_query_point(x, self.d)
        return RadialProfile.around(self.points, self.weights, point, self.index, r_max)

    def scaled(self, c: float) -> 'DiscreteMeasure':
        """c * mu for c >= 0; weights are multiplied elementwise."""
        if c < 0:
            raise NegativeWeightError(f"Cannot scale a positive measure by {c}")
        return DiscreteMeasure(self.points, self.weights * c, self.n, self.d, self.h, self.metadata)

    def with_metadata(self, **updates) -> 'DiscreteMeasure':
        metadata = dict(self.metadata)
        metadata.update(updates)
        return DiscreteMeasure(self.points, self.weights, self.n, self.d, self.h, metadata)


def build_measure(points, weights, n: int, d: int, h: float,
                  metadata: Optional[Dict[str, Any]] = None) -> DiscreteMeasure:
    """
    Validate inputs and build a DiscreteMeasure.

    Raises:
        LengthMismatchError: points and weights differ in length
        NegativeWeightError: a weight is negative
        DimensionError: n > d or a dimension is below 1
        ValidationError: h <= 0 or a non-finite value
    """
    validate_dimensions(n, d)
    h = float(h)
    if not np.isfinite(h) or h <= 0:
        raise ValidationError(f"Resolution h must be > 0, got {h}")

    weight_array = np.asarray(weights, dtype=np.float64).reshape(-1)
    raw_points = np.asarray(points, dtype=np.float64)
    if raw_points.size == 0:
        point_count = 0
    elif raw_points.ndim == 1 and d == 1:
        point_count = len(raw_points)
    elif raw_points.ndim == 2:
        point_count = raw_points.shape[0]
    else:
        raise DimensionError(f"Expected points of shape (N, {d}), got {raw_points.shape}")
    if point_count != len(weight_array):
        raise LengthMismatchError(
            f"points and weights must have equal length ({point_count} != {len(weight_array)})"
        )
    point_array = as_point_array(raw_points, d)

    if not is_finite_array(weight_array):
        raise ValidationError("Weights must be finite")
    if np.any(weight_array < 0):
        first = int(np.argmax(weight_array < 0))
        raise NegativeWeightError(f"Weight {first} is negative ({weight_array[first]})")

    measure = DiscreteMeasure(point_array, weight_array, n, d, h, metadata)
    logger.debug(f"Built measure with {len(measure)} points, total mass {measure.total_mass:.6g}")
    return measure


def ball_mass(measure: DiscreteMeasure, x, r: float) -> float:
    """mu(B(x, r)) over the closed Euclidean ball."""
    radius = validate_radius(r)
    point = as_query_point(x, measure.d)
    return measure.index.ball_mass(point, radius)


def ball_masses(measure: DiscreteMeasure, x, radii) -> np.ndarray:
    """mu(B(x, r)) for every r in radii, each summed in index order."""
    radii = np.asarray(radii, dtype=np.float64).reshape(-1)
    if np.any(np.isnan(radii)):
        raise ValidationError("Radii must not be NaN")
    if np.any(radii < 0):
        raise ValidationError(f"Radii must be >= 0, got min {radii.min()}")
    point = as_query_point(x, measure.d)
    return measure.index.ball_masses(point, radii)


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box [lower, upper]."""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64).reshape(-1)
        upper = np.asarray(self.upper, dtype=np.float64).reshape(-1)
        if lower.shape != upper.shape:
            raise DimensionError("Box corners must have the same dimension")
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)

    def contains(self, points: np.ndarray) -> np.ndarray:
        if len(points) == 0:
            return np.zeros(0, dtype=bool)
        return np.all((points >= self.lower) & (points <= self.upper), axis=1)


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball B(center, radius)."""
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, 'center', np.asarray(self.center, dtype=np.float64).reshape(-1))
        object.__setattr__(self, 'radius', validate_radius(self.radius, name='radius'))

    def contains(self, points: np.ndarray) -> np.ndarray:
        if len(points) == 0:
            return np.zeros(0, dtype=bool)
        return np.linalg.norm(points - self.center, axis=1) <= self.radius


Region = Union[Box, Ball]


def restrict(measure: DiscreteMeasure, region: Region) -> DiscreteMeasure:
    """
    mu restricted to a closed box or ball. Weights and h are unchanged.

    Point-level metadata such as mixture components no longer applies and is dropped.
    """
    dim = len(region.center) if isinstance(region, Ball) else len(region.lower)
    if dim != measure.d:
        raise DimensionError(f"Region has dimension {dim}, measure has {measure.d}")
    mask = region.contains(measure.points)
    metadata = {k: v for k, v in measure.metadata.items() if k != 'components'}
    metadata['restricted'] = True
    return DiscreteMeasure(measure.points[mask], measure.weights[mask], measure.n, measure.d, measure.h, metadata)


def zero_measure(n: int, d: int, h: float = 1.0) -> DiscreteMeasure:
    return build_measure(np.zeros((0, d)), np.zeros(0), n, d, h)


@dataclass(frozen=True)
class SignedMeasure:
    """nu = pos - neg, stored as two positive parts without cancellation."""
    pos: DiscreteMeasure
    neg: DiscreteMeasure
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.pos.d != self.neg.d:
            raise DimensionError(f"Signed measure parts differ in dimension ({self.pos.d} != {self.neg.d})")

    @property
    def d(self) -> int:
        return self.pos.d

    @property
    def n(self) -> int:
        return self.pos.n

    @property
    def is_zero(self) -> bool:
        return self.pos.total_mass == 0.0 and self.neg.total_mass == 0.0

    def scaled(self, c: float) -> 'SignedMeasure':
        """c * nu; a negative factor swaps the parts."""
        if c >= 0:
            return SignedMeasure(self.pos.scaled(c), self.neg.scaled(c), self.metadata)
        return SignedMeasure(self.neg.scaled(-c), self.pos.scaled(-c), self.metadata)

    def atoms(self):
        """(points, signed weights) of both parts, positive part first."""
        points = np.vstack([self.pos.points, self.neg.points])
        weights = np.concatenate([self.pos.weights, -self.neg.weights])
        return points, weights


def signed_measure(points, signed_weights, n: int, d: int, h: float,
                   metadata: Optional[Dict[str, Any]] = None) -> SignedMeasure:
    """Split atoms with signed weights into positive and negative parts."""
    validate_dimensions(n, d)
    weight_array = np.asarray(signed_weights, dtype=np.float64).reshape(-1)
    point_array = as_point_array(points, d)
    if len(point_array) != len(weight_array):
        raise LengthMismatchError(
            f"points and weights must have equal length ({len(point_array)} != {len(weight_array)})"
        )
    if not is_finite_array(weight_array):
        raise ValidationError("Signed weights must be finite")
    positive = weight_array > 0
    negative = weight_array < 0
    pos = build_measure(point_array[positive], weight_array[positive], n, d, h)
    neg = build_measure(point_array[negative], -weight_array[negative], n, d, h)
    return SignedMeasure(pos, neg, dict(metadata or {}))


def density_signed_measure(measure: DiscreteMeasure, f) -> SignedMeasure:
    """f * mu split by the sign of f (one value of f per support point)."""
    values = np.asarray(f, dtype=np.float64).reshape(-1)
    if len(values) != len(measure):
        raise LengthMismatchError(f"f has {len(values)} values for {len(measure)} points")
    return signed_measure(measure.points, values * measure.weights, measure.n, measure.d, measure.h)


def total_variation(nu: SignedMeasure) -> float:
    """||nu|| = pos.total_mass + neg.total_mass."""
    return nu.pos.total_mass + nu.neg.total_mass


def signed_ball_mass(nu: SignedMeasure, x, r: float) -> float:
    """nu(B(x, r)) = pos(B(x, r)) - neg(B(x, r))."""
    return ball_mass(nu.pos, x, r) - ball_mass(nu.neg, x, r)


def signed_ball_masses(nu: SignedMeasure, x, radii) -> np.ndarray:
    return ball_masses(nu.pos, x, radii) - ball_masses(nu.neg, x, radii)
