"""
Scale grids - log-spaced radii with quadrature weights for integrals in dr/r
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.measures.core import DiscreteMeasure
from src.utils.errors import ResolutionError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScaleGrid:
    """
    Radii r_k = r_max * 2^(-k/m), k = 0..K, strictly decreasing.

    log_weights are ln(2)/m on r_0..r_{K-1} and 0 on r_K (left-point rule on
    [r_{k+1}, r_k]), so they sum to ln(r_max/r_min).

    Attributes:
        r_max: largest radius
        r_min: finest radius actually on the grid
        r_floor: requested lower bound (r_min >= r_floor)
        m: scales per octave
        radii: descending radii
        log_weights: quadrature weights for dr/r
        requested_octaves: octaves asked for, when the grid came from a measure
        h: resolution of the measure the grid was built for
    """
    r_max: float
    r_min: float
    r_floor: float
    m: int
    radii: np.ndarray
    log_weights: np.ndarray
    requested_octaves: Optional[float] = None
    h: Optional[float] = None

    @classmethod
    def from_bounds(cls, r_max: float, r_min: float, m: int,
                    requested_octaves: Optional[float] = None, h: Optional[float] = None) -> 'ScaleGrid':
        """Grid from r_max down to the last node >= r_min."""
        if int(m) < 1:
            raise ValidationError(f"Scales per octave m must be >= 1, got {m}")
        m = int(m)
        if not (r_max > 0 and r_min > 0):
            raise ValidationError(f"Grid radii must be positive (r_max={r_max}, r_min={r_min})")
        limit = f" (limited by h = {h:g})" if h is not None else ""
        if r_min >= r_max:
            raise ResolutionError(
                f"Insufficient resolution: r_min = {r_min:g} >= r_max = {r_max:g}{limit}",
                r_min=r_min, h=h,
            )
        steps = int(math.floor(m * math.log2(r_max / r_min) + 1e-9))
        if steps < 1:
            raise ResolutionError(
                f"Insufficient resolution: r_min = {r_min:g} leaves no scale step below r_max = {r_max:g}{limit}",
                r_min=r_min, h=h,
            )
        k = np.arange(steps + 1, dtype=np.float64)
        radii = r_max * 2.0 ** (-k / m)
        log_weights = np.full(steps + 1, math.log(2.0) / m)
        log_weights[-1] = 0.0
        radii.setflags(write=False)
        log_weights.setflags(write=False)
        return cls(float(r_max), float(radii[-1]), float(r_min), m, radii, log_weights, requested_octaves, h)

    def __len__(self) -> int:
        return len(self.radii)

    @property
    def steps(self) -> int:
        return len(self.radii) - 1

    @property
    def effective_octaves(self) -> float:
        return self.steps / self.m

    @property
    def full_octaves(self) -> int:
        return self.steps // self.m

    @property
    def octave_count(self) -> int:
        """Octaves including a trailing partial one."""
        return -(-self.steps // self.m)

    @property
    def octave_index(self) -> np.ndarray:
        """Octave of each node; the zero-weight finest node joins the last octave."""
        return np.minimum(np.arange(len(self.radii)) // self.m, self.octave_count - 1)

    @property
    def finest_octave_mask(self) -> np.ndarray:
        """Nodes with r_k <= 2 * r_min."""
        return np.arange(len(self.radii)) >= self.steps - self.m

    @property
    def total_log_weight(self) -> float:
        return float(np.sum(self.log_weights))

    def clipped(self, R: float) -> 'ScaleGrid':
        """The nodes with r_k < R, keeping their weights."""
        mask = self.radii < R
        if not mask.any():
            raise ValidationError(f"No grid radius below R = {R:g} (r_min = {self.r_min:g})")
        radii = self.radii[mask].copy()
        weights = self.log_weights[mask].copy()
        radii.setflags(write=False)
        weights.setflags(write=False)
        return ScaleGrid(float(radii[0]), float(radii[-1]), self.r_floor, self.m, radii, weights,
                         self.requested_octaves, self.h)

    def to_dict(self) -> dict:
        return {
            'r_max': self.r_max,
            'r_min': self.r_min,
            'r_floor': self.r_floor,
            'm': self.m,
            'nodes': len(self.radii),
            'effective_octaves': self.effective_octaves,
            'requested_octaves': self.requested_octaves,
            'h': self.h,
        }


def make_scale_grid(measure: DiscreteMeasure, octaves: float, m: int, safety: float = 1.0,
                    diam_fraction: float = 0.25) -> ScaleGrid:
    """
    Grid for a measure: r_max = diam * diam_fraction and
    r_min = max(safety * 10 * h, r_max * 2^-octaves).

    Raises:
        ResolutionError: r_min >= r_max; the message names h
    """
    if safety < 1:
        raise ValidationError(f"safety must be >= 1, got {safety}")
    if octaves <= 0:
        raise ValidationError(f"octaves must be > 0, got {octaves}")
    if measure.is_empty:
        raise ResolutionError("Cannot build a scale grid for an empty measure", h=measure.h)
    r_max = measure.diameter * diam_fraction
    resolution_floor = safety * 10 * measure.h
    r_min = max(resolution_floor, r_max * 2.0 ** (-octaves))
    if r_max <= 0:
        raise ResolutionError(
            f"Insufficient resolution: support diameter is 0 so r_max = 0 <= r_min = {r_min:g} "
            f"(h = {measure.h:g})", r_min=r_min, h=measure.h,
        )
    grid = ScaleGrid.from_bounds(r_max, r_min, m, requested_octaves=octaves, h=measure.h)
    if grid.effective_octaves < octaves - 1e-9:
        logger.warning(
            f"Resolution clamp: r_min = {r_min:.6g} (10*h*safety, h = {measure.h:g}) "
            f"leaves {grid.effective_octaves:.3g} of {octaves} requested octaves"
        )
    return grid
