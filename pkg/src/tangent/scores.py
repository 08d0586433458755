"""
Flatness and uniformity scores of blowups, and traces over decreasing radii

A trace only describes the blowups along the radii it was given. Reports
phrase every conclusion as holding along tested scales.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from config.settings import get_settings
from src.measures.core import DiscreteMeasure
from src.utils.errors import PreconditionError, ResolutionError, ValidationError
from src.utils.validators import as_query_point
from .blowup import Blowup, blowup

logger = logging.getLogger(__name__)

# log(beta2) is taken at this floor for exactly flat blowups
BETA2_FLOOR = 1e-12

# Probe radii run from PROBE_RESOLUTION * h up to 1
PROBE_RESOLUTION = 10.0
PROBE_RADII = 8

SCOPE = 'along tested scales'


@dataclass
class FlatnessScore:
    """
    L2 distance of the blowup on B(0, 1) to its best-fit n-plane.

    Attributes:
        beta2: (integral over B(0,1) of dist(y, plane)^2 dnu(y))^(1/2)
        barycenter: point of the plane
        basis: (d, n) orthonormal directions of the plane
    """
    beta2: float
    barycenter: np.ndarray
    basis: np.ndarray

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T


@dataclass
class UniformityScore:
    c_fit: float
    max_rel_dev: float
    probes: int = 0
    radii: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _unit_ball(nu: Blowup):
    ids = nu.measure.index.members(np.zeros(nu.measure.d), 1.0)
    ids = ids[nu.measure.weights[ids] > 0]
    return nu.measure.points[ids], nu.measure.weights[ids]


def flatness_beta2(nu: Blowup, n: Optional[int] = None) -> FlatnessScore:
    """
    Fit an n-plane through the barycenter along the top-n principal directions
    of the weighted covariance on B(0, 1), and measure the L2 distance to it.

    Raises:
        PreconditionError: fewer than n distinct points in B(0, 1)
    """
    n = nu.measure.n if n is None else int(n)
    d = nu.measure.d
    if not 1 <= n <= d:
        raise ValidationError(f"Plane dimension must lie in [1, {d}], got {n}")
    points, weights = _unit_ball(nu)
    distinct = len(np.unique(points, axis=0)) if len(points) else 0
    if distinct < n:
        raise PreconditionError(f"Cannot fit a {n}-plane to {distinct} distinct points")

    mass = float(np.sum(weights))
    barycenter = weights @ points / mass
    centered = points - barycenter
    covariance = (centered * weights[:, None]).T @ centered / mass
    _, vectors = np.linalg.eigh(covariance)
    # eigh sorts eigenvalues ascending
    basis = vectors[:, ::-1][:, :n]
    normal = vectors[:, :d - n]
    distances = np.sum((centered @ normal) ** 2, axis=1)
    beta2 = float(np.sqrt(np.sum(weights * distances)))
    return FlatnessScore(beta2, barycenter, basis)


def probe_radii(nu: Blowup) -> np.ndarray:
    """Geometric radii from 10 h to 1 in blowup coordinates."""
    lower = PROBE_RESOLUTION * nu.measure.h
    if lower >= 1.0:
        raise ResolutionError(
            f"Blowup at r = {nu.r:g} does not resolve probe balls: r_min = {lower:g} >= 1 "
            f"(h = {nu.measure.h:g})", r_min=lower, h=nu.measure.h,
        )
    return np.geomspace(lower, 1.0, PROBE_RADII)


def uniformity_score(nu: Blowup, n: Optional[int] = None, probe_count: Optional[int] = None,
                     seed: int = 0) -> UniformityScore:
    """
    Compare nu(B(y, rho)) / rho^n against its median over probes y in the
    support inside B(0, 1) and radii rho in [10 h, 1].

    Raises:
        PreconditionError: no support point in B(0, 1)
        ResolutionError: 10 h >= 1
    """
    n = nu.measure.n if n is None else int(n)
    probe_count = get_settings().probe_count if probe_count is None else int(probe_count)
    if probe_count < 1:
        raise ValidationError(f"probe_count must be >= 1, got {probe_count}")
    radii = probe_radii(nu)
    candidates, _ = _unit_ball(nu)
    if len(candidates) == 0:
        raise PreconditionError("No support point inside B(0, 1) to probe")
    if len(candidates) > probe_count:
        chosen = np.sort(np.random.default_rng(seed).choice(len(candidates), probe_count, replace=False))
        candidates = candidates[chosen]

    ratios = np.vstack([nu.measure.ball_masses(y, radii) / radii ** n for y in candidates])
    c_fit = float(np.median(ratios))
    max_rel_dev = float(np.max(np.abs(ratios - c_fit)) / c_fit)
    return UniformityScore(c_fit, max_rel_dev, len(candidates), radii)


@dataclass
class BlowupTrace:
    """Scores of T_{x,r}#mu over decreasing radii."""
    x: np.ndarray
    radii: np.ndarray
    beta2: np.ndarray
    c_fit: np.ndarray
    max_rel_dev: np.ndarray
    slope: float
    point_id: Optional[int] = None

    @property
    def min_beta2(self) -> float:
        return float(self.beta2.min())

    def rows(self) -> List[dict]:
        """One record per radius in the trace CSV layout."""
        point_id = -1 if self.point_id is None else self.point_id
        return [
            {'point_id': point_id, 'r': float(r), 'beta2': float(b), 'c_fit': float(c), 'max_rel_dev': float(m)}
            for r, b, c, m in zip(self.radii, self.beta2, self.c_fit, self.max_rel_dev)
        ]

    def to_dict(self) -> dict:
        return {
            'point_id': self.point_id,
            'x': self.x.tolist(),
            'radii': self.radii.tolist(),
            'beta2_slope': self.slope,
            'min_beta2': self.min_beta2,
            'max_rel_dev': float(self.max_rel_dev.max()),
            'scope': SCOPE,
        }


def log_slope(radii: np.ndarray, beta2: np.ndarray) -> float:
    """Least-squares slope of log beta2 against log r, beta2 floored at BETA2_FLOOR."""
    if len(radii) < 2:
        return 0.0
    return float(np.polyfit(np.log(radii), np.log(np.maximum(beta2, BETA2_FLOOR)), 1)[0])


def blowup_trace(measure: DiscreteMeasure, x, radii: Sequence[float], window: Optional[float] = None,
                 probe_count: Optional[int] = None, seed: int = 0,
                 point_id: Optional[int] = None) -> BlowupTrace:
    """
    Flatness and uniformity of the blowups at each radius, largest radius first.

    Raises:
        ValidationError: radii empty, non-positive or not strictly decreasing
        ResolutionError: a radius too small for the probe balls
    """
    point = as_query_point(x, measure.d)
    radii = np.asarray(radii, dtype=np.float64).reshape(-1)
    if len(radii) == 0:
        raise ValidationError("A blowup trace needs at least one radius")
    if np.any(~np.isfinite(radii)) or np.any(radii <= 0):
        raise ValidationError("Trace radii must be finite and > 0")
    if np.any(np.diff(radii) >= 0):
        raise ValidationError("Trace radii must be strictly decreasing")

    beta2, c_fit, deviation = [], [], []
    for r in radii:
        nu = blowup(measure, point, r, window)
        flat = flatness_beta2(nu)
        uniform = uniformity_score(nu, probe_count=probe_count, seed=seed)
        beta2.append(flat.beta2)
        c_fit.append(uniform.c_fit)
        deviation.append(uniform.max_rel_dev)

    beta2 = np.asarray(beta2)
    trace = BlowupTrace(point, radii, beta2, np.asarray(c_fit), np.asarray(deviation),
                        log_slope(radii, beta2), point_id)
    logger.info(f"Blowup trace over {len(radii)} radii: beta2 slope {trace.slope:.4g}, "
                f"min beta2 {trace.min_beta2:.4g} ({SCOPE})")
    return trace
