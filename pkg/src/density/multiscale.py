"""
Multiscale density analysis: density ratios, dyadic density differences,
square functions and Carleson energies
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.measures.core import Ball, DiscreteMeasure, ball_masses, restrict
from src.utils.errors import ValidationError
from src.utils.validators import as_query_point, validate_radius
from .grid import ScaleGrid
from .smoothing import smoothed_delta_batch

logger = logging.getLogger(__name__)

# Octaves averaged by the divergence slope
SLOPE_OCTAVES = 4


def density_ratio(measure: DiscreteMeasure, x, r: float) -> float:
    """theta(x, r) = mu(B(x, r)) / r^n."""
    r = validate_radius(r, allow_zero=False)
    return float(ball_masses(measure, x, [r])[0]) / r ** measure.n


def delta(measure: DiscreteMeasure, x, r: float) -> float:
    """Delta_mu(x, r) = theta(x, r) - theta(x, 2r), both from one ball-mass batch."""
    r = validate_radius(r, allow_zero=False)
    two_r = 2 * r
    masses = ball_masses(measure, x, [r, two_r])
    return float(masses[0] / r ** measure.n - masses[1] / two_r ** measure.n)


def _profile_arrays(measure: DiscreteMeasure, x: np.ndarray, radii: np.ndarray):
    """theta(r_k), theta(2 r_k) and Delta(r_k) with the same backend as delta()."""
    masses = ball_masses(measure, x, np.concatenate([radii, 2 * radii]))
    k = len(radii)
    theta = masses[:k] / radii ** measure.n
    theta_double = masses[k:] / (2 * radii) ** measure.n
    return theta, theta_double, theta - theta_double


@dataclass
class DensityExtremes:
    """Finite-scale stand-ins for the lower and upper densities at x."""
    finest_min: float
    finest_max: float
    global_min: float
    global_max: float

    @property
    def theta_lo(self) -> float:
        return self.finest_min

    @property
    def theta_hi(self) -> float:
        return self.global_max


@dataclass
class DensityProfile:
    """theta and Delta at every grid radius around one point, radii descending."""
    x: np.ndarray
    radii: np.ndarray
    theta: np.ndarray
    delta: np.ndarray
    extremes: DensityExtremes
    smoothed_delta: Optional[np.ndarray] = None
    point_id: Optional[int] = None
    finest_max_abs_delta: float = 0.0

    @property
    def theta_star_lower(self) -> float:
        return self.extremes.theta_lo

    @property
    def theta_star_upper(self) -> float:
        return self.extremes.theta_hi

    @property
    def condition_c(self) -> float:
        """max |Delta| over the finest octave."""
        return self.finest_max_abs_delta


def _extremes(theta: np.ndarray, grid: ScaleGrid) -> DensityExtremes:
    finest = theta[grid.finest_octave_mask]
    return DensityExtremes(float(finest.min()), float(finest.max()), float(theta.min()), float(theta.max()))


def density_extremes(measure: DiscreteMeasure, x, grid: ScaleGrid) -> DensityExtremes:
    """min/max of theta(x, r_k) over the finest octave and over the whole grid."""
    point = as_query_point(x, measure.d)
    masses = ball_masses(measure, point, grid.radii)
    return _extremes(masses / grid.radii ** measure.n, grid)


def density_profile(measure: DiscreteMeasure, x, grid: ScaleGrid, point_id: Optional[int] = None,
                    smoothed: bool = False) -> DensityProfile:
    """Profile of theta and Delta over the grid, optionally with the Gaussian-smoothed Delta."""
    point = as_query_point(x, measure.d)
    theta, _, deltas = _profile_arrays(measure, point, grid.radii)
    smoothed_values = None
    if smoothed:
        smoothed_values = smoothed_delta_batch(measure, point, grid.radii)
    return DensityProfile(
        x=point,
        radii=grid.radii,
        theta=theta,
        delta=deltas,
        extremes=_extremes(theta, grid),
        smoothed_delta=smoothed_values,
        point_id=point_id,
        finest_max_abs_delta=float(np.abs(deltas[grid.finest_octave_mask]).max()),
    )


def octave_sums(values: np.ndarray, grid: ScaleGrid) -> np.ndarray:
    """Sum of values * log_weight per octave, largest scales first."""
    return np.bincount(grid.octave_index, weights=values * grid.log_weights, minlength=grid.octave_count)


def divergence_slope(increments: np.ndarray, full_octaves: int) -> float:
    """Mean per-octave increment over the last SLOPE_OCTAVES full octaves."""
    usable = increments[:full_octaves] if full_octaves > 0 else increments
    if len(usable) == 0:
        return 0.0
    tail = usable[-min(SLOPE_OCTAVES, len(usable)):]
    return float(np.mean(tail))


@dataclass
class SquareFunctionResult:
    """
    Discretized integral of Delta^2 dr/r around x.

    s2_partial[o] is the cumulative sum through octave o, starting at r_max.
    """
    x: np.ndarray
    s2: float
    s2_partial: np.ndarray
    slope: float
    smoothed_s2: Optional[float] = None
    deltas: np.ndarray = field(default_factory=lambda: np.zeros(0))
    point_id: Optional[int] = None

    @property
    def octave_increments(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.s2_partial]))


def square_function_from_deltas(x: np.ndarray, deltas: np.ndarray, grid: ScaleGrid,
                                smoothed: Optional[np.ndarray] = None,
                                point_id: Optional[int] = None) -> SquareFunctionResult:
    """Square function from precomputed Delta values on the grid."""
    if len(deltas) != len(grid.radii):
        raise ValidationError(f"Got {len(deltas)} Delta values for a grid of {len(grid.radii)} radii")
    squares = deltas ** 2
    s2 = float(np.sum(squares * grid.log_weights))
    s2_partial = np.cumsum(octave_sums(squares, grid))
    increments = np.diff(np.concatenate([[0.0], s2_partial]))
    smoothed_s2 = float(np.sum(smoothed ** 2 * grid.log_weights)) if smoothed is not None else None
    return SquareFunctionResult(
        x=x,
        s2=s2,
        s2_partial=s2_partial,
        slope=divergence_slope(increments, grid.full_octaves),
        smoothed_s2=smoothed_s2,
        deltas=deltas,
        point_id=point_id,
    )


def square_function(measure: DiscreteMeasure, x, grid: ScaleGrid, smoothed: bool = False,
                    point_id: Optional[int] = None) -> SquareFunctionResult:
    """s2 = sum_k Delta(x, r_k)^2 * log_weight_k with per-octave partial sums."""
    point = as_query_point(x, measure.d)
    _, _, deltas = _profile_arrays(measure, point, grid.radii)
    smoothed_values = None
    if smoothed:
        smoothed_values = smoothed_delta_batch(measure, point, grid.radii)
    return square_function_from_deltas(point, deltas, grid, smoothed_values, point_id)


def carleson_energy(measure: DiscreteMeasure, center, R: float, grid: ScaleGrid) -> float:
    """
    sum over support points x in B(center, R) of w_x * sum_{r_k < R} Delta(x, r_k)^2 * log_weight_k.

    Returns 0 when the ball misses the support.
    """
    R = validate_radius(R, allow_zero=False, name='R')
    center = as_query_point(center, measure.d)
    local = restrict(measure, Ball(center, R))
    if local.is_empty:
        logger.debug(f"Carleson ball of radius {R:g} misses the support")
        return 0.0
    mask = grid.radii < R
    if not mask.any():
        return 0.0
    radii = grid.radii[mask]
    weights = grid.log_weights[mask]
    energy = 0.0
    for point, w in zip(local.points, local.weights):
        _, _, deltas = _profile_arrays(measure, point, radii)
        energy += w * float(np.sum(deltas ** 2 * weights))
    return energy
