"""
Data models for per-point verdicts and run summaries
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

from config.settings import get_settings

# Attached to every report: the decision rule is a finite-scale calibration
CALIBRATION_NOTE = (
    'slope_threshold and density_floor are finite-scale calibrations; '
    'verdicts hold along tested scales only'
)


class Verdict(str, Enum):
    """Outcome of the finite-scale rectifiability test at one point."""
    RECTIFIABLE_CONSISTENT = "rectifiable-consistent"
    DIVERGENT = "divergent"
    LOW_DENSITY = "low-density"
    BOUNDARY_EXCLUDED = "boundary-excluded"


class ClassifierConfig(BaseModel):
    """Thresholds of the decision table."""
    slope_threshold: float = Field(0.005, ge=0.0)
    density_floor: float = Field(0.05, ge=0.0)
    boundary_margin_factor: float = Field(2.0, ge=0.0)

    @classmethod
    def from_settings(cls) -> 'ClassifierConfig':
        settings = get_settings()
        return cls(
            slope_threshold=settings.slope_threshold,
            density_floor=settings.density_floor,
            boundary_margin_factor=settings.boundary_margin_factor,
        )


@dataclass
class PointVerdict:
    """Statistics and verdict for one evaluation point."""
    point_id: int
    s2: float
    slope: float
    theta_lo: float
    theta_hi: float
    boundary: bool
    verdict: Verdict
    condition_c: float = 0.0
    smoothed_s2: Optional[float] = None

    def to_row(self) -> Dict[str, Any]:
        return {
            'point_id': self.point_id,
            's2': self.s2,
            'slope': self.slope,
            'theta_lo': self.theta_lo,
            'theta_hi': self.theta_hi,
            'boundary': int(self.boundary),
            'condition_c': self.condition_c,
            'verdict': self.verdict.value,
        }


@dataclass
class SummaryReport:
    """
    Aggregate of a verdict list.

    accuracy is None when no evaluated point carries a ground-truth label.
    """
    measure: Dict[str, Any]
    config: Dict[str, Any]
    points: int
    counts: Dict[str, int]
    fractions: Dict[str, float]
    median_s2: float
    median_slope: float
    condition_c_median: float
    accuracy: Optional[float] = None
    labeled_points: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    def fraction(self, verdict: Verdict) -> float:
        return self.fractions[verdict.value]

    def classified_fraction(self, verdict: Verdict) -> float:
        """Fraction among points not excluded at the boundary."""
        kept = self.points - self.counts[Verdict.BOUNDARY_EXCLUDED.value]
        return self.counts[verdict.value] / kept if kept else 0.0

    def to_dict(self) -> dict:
        report = {
            'measure': self.measure,
            'config': self.config,
            'points': self.points,
            'counts': self.counts,
            'fractions': self.fractions,
            'medians': {
                's2': self.median_s2,
                'slope': self.median_slope,
                'condition_c': self.condition_c_median,
            },
        }
        if self.accuracy is not None:
            report['accuracy'] = self.accuracy
            report['labeled_points'] = self.labeled_points
        report.update(self.extra)
        return report
