"""
Square-function operator on signed measures and its weak-(1,1) statistic
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from src.measures.core import (
    DiscreteMeasure,
    SignedMeasure,
    density_signed_measure,
    signed_ball_masses,
    total_variation,
)
from src.utils.errors import ValidationError
from src.utils.validators import as_point_array
from .grid import ScaleGrid

logger = logging.getLogger(__name__)


def operator_T(nu: SignedMeasure, eval_points, grid: ScaleGrid, n: Optional[int] = None) -> np.ndarray:
    """
    T nu(x) = (sum_k |nu(B(x,r_k))/r_k^n - nu(B(x,2r_k))/(2r_k)^n|^2 * log_weight_k)^(1/2).

    The grid must reach the scales where nu has structure; atoms closer to x
    than r_min/2 or farther than 2 r_max are not seen.
    """
    n = nu.n if n is None else int(n)
    points = as_point_array(eval_points, nu.d)
    radii = grid.radii
    both = np.concatenate([radii, 2 * radii])
    k = len(radii)
    values = np.zeros(len(points))
    for i, x in enumerate(points):
        masses = signed_ball_masses(nu, x, both)
        diffs = masses[:k] / radii ** n - masses[k:] / (2 * radii) ** n
        values[i] = np.sqrt(np.sum(diffs ** 2 * grid.log_weights))
    return values


def operator_T_mu(measure: DiscreteMeasure, f, eval_points, grid: ScaleGrid) -> np.ndarray:
    """T_mu f = T(f mu), with f given at the support points of mu."""
    return operator_T(density_signed_measure(measure, f), eval_points, grid, measure.n)


@dataclass
class WeakTypeResult:
    """sup over lambda of lambda * mu{T nu > lambda} / ||nu||."""
    statistic: float
    lambdas: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    total_variation: float = 0.0


def weak_11_statistic(measure: DiscreteMeasure, nu: SignedMeasure, grid: ScaleGrid,
                      lambdas: Sequence[float], T_values: Optional[np.ndarray] = None) -> WeakTypeResult:
    """
    Empirical weak-(1,1) constant of T from signed measures to L^{1,inf}(mu),
    with T nu evaluated at every support point of mu and weighted by mu.

    Raises:
        ValidationError: empty or non-positive lambdas
    """
    lambdas = [float(v) for v in lambdas]
    if not lambdas:
        raise ValidationError("weak_11_statistic needs at least one lambda")
    if any(v <= 0 for v in lambdas):
        raise ValidationError("lambda values must be > 0")
    norm = total_variation(nu)
    if norm == 0:
        return WeakTypeResult(0.0, lambdas, [0.0] * len(lambdas), 0.0)
    T = operator_T(nu, measure.points, grid, measure.n) if T_values is None else np.asarray(T_values)
    ratios = [lam * float(np.sum(measure.weights[T > lam])) / norm for lam in lambdas]
    statistic = max(ratios)
    logger.debug(f"Weak-(1,1) statistic {statistic:.4g} over {len(lambdas)} thresholds")
    return WeakTypeResult(statistic, lambdas, ratios, norm)
