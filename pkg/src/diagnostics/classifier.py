"""
Per-point rectifiability verdicts and their summary
"""

import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from src.density.multiscale import DensityProfile, SquareFunctionResult
from src.measures.core import DiscreteMeasure
from src.utils.errors import ValidationError
from .models import CALIBRATION_NOTE, ClassifierConfig, PointVerdict, SummaryReport, Verdict

logger = logging.getLogger(__name__)


def _point_domain(measure: DiscreteMeasure, point_id: int):
    """(known, domain) for a support point; domain None means a closed set."""
    for component in measure.metadata.get('components') or []:
        if component['start'] <= point_id < component['stop']:
            return True, component.get('domain')
    if 'domain' in measure.metadata:
        return True, measure.metadata['domain']
    return False, None


def is_boundary_point(measure: DiscreteMeasure, point_id: int, margin: float) -> bool:
    """
    True when the point lies within margin of the edge of its parameter domain.

    Measures without domain metadata fall back to the bounding box, ignoring
    axes thinner than 2 * margin.
    """
    x = measure.points[point_id]
    known, domain = _point_domain(measure, point_id)
    if known:
        if domain is None:
            return False
        for value, axis in zip(x, domain):
            if axis is not None and (value - axis[0] < margin or axis[1] - value < margin):
                return True
        return False
    lower, upper = measure.bounds
    wide = (upper - lower) > 2 * margin
    near = (x - lower < margin) | (upper - x < margin)
    return bool(np.any(wide & near))


def boundary_flags(measure: DiscreteMeasure, point_ids: Sequence[int], r_max: float,
                   factor: float) -> np.ndarray:
    margin = factor * r_max
    return np.array([is_boundary_point(measure, int(i), margin) for i in point_ids], dtype=bool)


def classify_point(profile: DensityProfile, sqfn: SquareFunctionResult,
                   config: Optional[ClassifierConfig] = None, boundary: bool = False) -> PointVerdict:
    """
    Decision table: boundary -> excluded; theta_lo < floor -> low-density;
    slope > threshold -> divergent; otherwise rectifiable-consistent.

    Raises:
        ValidationError: profile and square function come from different grids or points
    """
    config = config or ClassifierConfig.from_settings()
    if len(profile.delta) != len(sqfn.deltas) or not np.array_equal(profile.delta, sqfn.deltas):
        raise ValidationError("Density profile and square function were computed on different grids")
    if profile.point_id != sqfn.point_id:
        raise ValidationError(f"Profile of point {profile.point_id} paired with square function of {sqfn.point_id}")

    theta_lo = profile.theta_star_lower
    if boundary:
        verdict = Verdict.BOUNDARY_EXCLUDED
    elif theta_lo < config.density_floor:
        verdict = Verdict.LOW_DENSITY
    elif sqfn.slope > config.slope_threshold:
        verdict = Verdict.DIVERGENT
    else:
        verdict = Verdict.RECTIFIABLE_CONSISTENT

    return PointVerdict(
        point_id=-1 if profile.point_id is None else int(profile.point_id),
        s2=sqfn.s2,
        slope=sqfn.slope,
        theta_lo=theta_lo,
        theta_hi=profile.theta_star_upper,
        boundary=bool(boundary),
        verdict=verdict,
        condition_c=profile.condition_c,
        smoothed_s2=sqfn.smoothed_s2,
    )


def _median(values) -> float:
    return float(np.median(values)) if len(values) else 0.0


def summarize(verdicts: Sequence[PointVerdict], ground_truth: Optional[np.ndarray] = None,
              measure_info: Optional[Dict[str, Any]] = None,
              config: Optional[Dict[str, Any]] = None) -> SummaryReport:
    """
    Fractions per verdict, medians over points not excluded at the boundary,
    and accuracy against ground truth indexed by point_id (1 rectifiable,
    0 not, NaN unknown).

    Accuracy counts only rectifiable-consistent and divergent points with a
    label; divergent matches an unrectifiable label. Boundary-excluded and
    low-density points carry no rectifiability call and are left out of both
    the numerator and labeled_points.
    """
    if not verdicts:
        raise ValidationError("Cannot summarize an empty verdict list")
    total = len(verdicts)
    counts = {verdict.value: 0 for verdict in Verdict}
    for item in verdicts:
        counts[item.verdict.value] += 1
    fractions = {key: count / total for key, count in counts.items()}

    kept = [item for item in verdicts if not item.boundary] or list(verdicts)

    accuracy, labeled = None, 0
    if ground_truth is not None:
        labels = np.asarray(ground_truth, dtype=np.float64)
        matches = 0
        for item in verdicts:
            if item.verdict not in (Verdict.RECTIFIABLE_CONSISTENT, Verdict.DIVERGENT):
                continue
            if not 0 <= item.point_id < len(labels) or np.isnan(labels[item.point_id]):
                continue
            labeled += 1
            rectifiable = labels[item.point_id] == 1.0
            matches += int(rectifiable == (item.verdict == Verdict.RECTIFIABLE_CONSISTENT))
        if labeled:
            accuracy = matches / labeled

    report_config = dict(config or {})
    report_config.setdefault('calibration', CALIBRATION_NOTE)
    report = SummaryReport(
        measure=dict(measure_info or {}),
        config=report_config,
        points=total,
        counts=counts,
        fractions=fractions,
        median_s2=_median([item.s2 for item in kept]),
        median_slope=_median([item.slope for item in kept]),
        condition_c_median=_median([item.condition_c for item in kept]),
        accuracy=accuracy,
        labeled_points=labeled,
    )
    logger.info(
        f"Summary of {total} points: "
        + ', '.join(f"{key} {fraction:.3f}" for key, fraction in fractions.items())
        + (f", accuracy {accuracy:.3f}" if accuracy is not None else '')
    )
    return report
