"""
Analysis Pipeline - per-point density statistics and verdicts over a worker pool

Points are evaluated in a ThreadPoolExecutor capped by Settings.threads and
gathered in evaluation order, so results never depend on scheduling.
"""

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config.settings import get_settings
from src.density.grid import ScaleGrid, make_scale_grid
from src.density.multiscale import DensityProfile, SquareFunctionResult, density_profile, square_function_from_deltas
from src.generators.synthetic import point_labels
from src.measures.core import DiscreteMeasure
from src.utils.errors import ValidationError
from .classifier import classify_point, is_boundary_point, summarize
from .models import ClassifierConfig, PointVerdict, SummaryReport

logger = logging.getLogger(__name__)


@dataclass
class PointResult:
    profile: DensityProfile
    square_function: SquareFunctionResult
    verdict: PointVerdict


def select_points(measure: DiscreteMeasure, mode: str = 'all', k: Optional[int] = None,
                  seed: int = 0) -> np.ndarray:
    """
    Evaluation points: every support point, or k of them drawn without
    replacement with the given seed (sorted).
    """
    count = len(measure)
    if mode == 'all':
        return np.arange(count)
    if mode != 'random':
        raise ValidationError(f"Unknown point selection '{mode}' (expected 'all' or 'random')")
    if k is None or k < 1:
        raise ValidationError(f"Random point selection needs k >= 1, got {k}")
    if k >= count:
        return np.arange(count)
    return np.sort(np.random.default_rng(seed).choice(count, size=k, replace=False))


def measure_info(measure: DiscreteMeasure) -> Dict[str, Any]:
    """Measure metadata carried into reports."""
    return {
        'generator': measure.metadata.get('generator', 'custom'),
        'params': measure.metadata.get('params', {}),
        'seed': measure.metadata.get('seed'),
        'points': len(measure),
        'n': measure.n,
        'd': measure.d,
        'h': measure.h,
        'total_mass': measure.total_mass,
        'rectifiable': measure.metadata.get('rectifiable'),
    }


class AnalysisPipeline:
    """Evaluate density profiles, square functions and verdicts at support points."""

    def __init__(self, measure: DiscreteMeasure, grid: Optional[ScaleGrid] = None,
                 config: Optional[ClassifierConfig] = None, threads: Optional[int] = None,
                 smoothed: bool = False):
        settings = get_settings()
        self.measure = measure
        self.grid = grid or make_scale_grid(
            measure, settings.octaves, settings.scales_per_octave, settings.safety, settings.diam_fraction
        )
        self.config = config or ClassifierConfig.from_settings()
        self.threads = max(1, int(threads if threads is not None else settings.threads))
        self.smoothed = smoothed
        self.margin = self.config.boundary_margin_factor * self.grid.r_max

    def evaluate_point(self, point_id: int) -> PointResult:
        """Profile, square function and verdict at one support point."""
        point_id = int(point_id)
        if not 0 <= point_id < len(self.measure):
            raise ValidationError(f"Point id {point_id} outside 0..{len(self.measure) - 1}")
        x = self.measure.points[point_id]
        profile = density_profile(self.measure, x, self.grid, point_id=point_id, smoothed=self.smoothed)
        sqfn = square_function_from_deltas(profile.x, profile.delta, self.grid,
                                           profile.smoothed_delta, point_id)
        boundary = is_boundary_point(self.measure, point_id, self.margin)
        return PointResult(profile, sqfn, classify_point(profile, sqfn, self.config, boundary))

    async def analyze(self, point_ids: Sequence[int]) -> List[PointResult]:
        """Evaluate the points in the worker pool; results follow point_ids order."""
        loop = asyncio.get_running_loop()
        logger.info(f"Analyzing {len(point_ids)} points with {self.threads} worker(s)")
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            tasks = [loop.run_in_executor(executor, self.evaluate_point, int(i)) for i in point_ids]
            results = await asyncio.gather(*tasks)
        logger.info(f"Finished {len(results)} points")
        return list(results)

    def run(self, point_ids: Sequence[int]) -> List[PointResult]:
        return asyncio.run(self.analyze(point_ids))

    def summarize(self, results: Sequence[PointResult], extra_config: Optional[Dict[str, Any]] = None) -> SummaryReport:
        """SummaryReport with the measure's ground-truth labels when it has them."""
        config = {'classifier': self.config.model_dump(), 'grid': self.grid.to_dict(), 'smoothed': self.smoothed}
        config.update(extra_config or {})
        return summarize(
            [result.verdict for result in results],
            ground_truth=point_labels(self.measure),
            measure_info=measure_info(self.measure),
            config=config,
        )
