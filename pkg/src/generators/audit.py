"""
AD-regularity audit: sampled density ratios against a two-sided constant
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from src.measures.core import DiscreteMeasure
from src.utils.errors import ResolutionError, ValidationError

logger = logging.getLogger(__name__)


@dataclass
class ADAuditResult:
    """Measured c0 with c0^-1 <= mu(B(x,r))/r^n <= c0 over the sampled (x, r)."""
    c0: float
    theta_min: float
    theta_max: float
    radii: list = field(default_factory=list)
    point_ids: list = field(default_factory=list)

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.c0))

    def to_dict(self) -> dict:
        return {
            'c0': self.c0,
            'theta_min': self.theta_min,
            'theta_max': self.theta_max,
            'radii': self.radii,
            'point_ids': self.point_ids,
        }


def default_audit_radii(measure: DiscreteMeasure, count: int = 8) -> np.ndarray:
    """Log-spaced radii from 10h to diam/4."""
    low, high = 10 * measure.h, measure.diameter / 4
    if low >= high:
        raise ResolutionError(
            f"Cannot audit: 10h = {low:g} >= diam/4 = {high:g} (h = {measure.h:g})",
            r_min=low, h=measure.h,
        )
    return np.geomspace(low, high, count)


def ad_regularity_audit(measure: DiscreteMeasure, sample: Optional[int] = 200,
                        radii: Optional[Sequence[float]] = None, seed: int = 0) -> ADAuditResult:
    """
    Sample support points and radii and report the smallest c0 that brackets
    every sampled density ratio.

    Args:
        sample: number of support points to draw (None for all)
        radii: radii to test, defaults to default_audit_radii
        seed: sampling seed
    """
    if measure.is_empty:
        raise ValidationError("Cannot audit an empty measure")
    radii = default_audit_radii(measure) if radii is None else np.asarray(radii, dtype=np.float64)
    if sample is None or sample >= len(measure):
        ids = np.arange(len(measure))
    else:
        ids = np.sort(np.random.default_rng(seed).choice(len(measure), size=sample, replace=False))

    thetas = np.array([measure.ball_masses(measure.points[i], radii) for i in ids]) / radii ** measure.n
    theta_min = float(thetas.min())
    theta_max = float(thetas.max())
    c0 = float(max(theta_max, 1.0 / theta_min)) if theta_min > 0 else float('inf')
    logger.info(f"AD audit over {len(ids)} points and {len(radii)} radii: c0 = {c0:.4g}")
    return ADAuditResult(c0, theta_min, theta_max, [float(r) for r in radii], [int(i) for i in ids])
