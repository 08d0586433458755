"""
Normalized blowups of a measure around a point
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config.settings import get_settings
from src.measures.core import DiscreteMeasure
from src.utils.errors import PreconditionError, ValidationError
from src.utils.validators import as_query_point, validate_radius

logger = logging.getLogger(__name__)


@dataclass
class Blowup:
    """
    Image of mu under y -> (y - x) / r, divided by the mass it puts on B(0, 1).

    Attributes:
        x: base point
        r: radius
        measure: blown-up measure restricted to B(0, window), h = mu.h / r
        normalization: mu-mass of the points whose images lie in B(0, 1)
        point_ids: index in mu of every blown-up point
        window: K, radius of the kept region in blowup coordinates
    """
    x: np.ndarray
    r: float
    measure: DiscreteMeasure
    normalization: float
    point_ids: np.ndarray
    window: float

    @property
    def unit_mass(self) -> float:
        return self.measure.ball_mass(np.zeros(self.measure.d), 1.0)

    def __len__(self) -> int:
        return len(self.measure)


def blowup(measure: DiscreteMeasure, x, r: float, window: Optional[float] = None) -> Blowup:
    """
    T_{x,r}#mu restricted to B(0, window) and scaled to unit mass on B(0, 1).

    Raises:
        PreconditionError: mu(B(x, r)) = 0
        ValidationError: r <= 0 or window < 1
    """
    point = as_query_point(x, measure.d)
    r = validate_radius(r, allow_zero=False)
    window = get_settings().window if window is None else float(window)
    if window < 1:
        raise ValidationError(f"Blowup window must be >= 1, got {window}")

    ids = measure.index.members(point, window * r)
    images = (measure.points[ids] - point) / r
    unit = np.linalg.norm(images, axis=1) <= 1.0
    normalization = float(np.sum(measure.weights[ids][unit]))
    if normalization <= 0:
        raise PreconditionError(f"mu(B(x, {r:g})) = 0 at x = {point.tolist()}; nothing to normalize")

    blown = DiscreteMeasure(
        images,
        measure.weights[ids] / normalization,
        measure.n,
        measure.d,
        measure.h / r,
        {'blowup': {'x': point.tolist(), 'r': r, 'window': window}},
    )
    logger.debug(f"Blowup at r = {r:g}: {len(ids)} points, normalization {normalization:.6g}")
    return Blowup(point, r, blown, normalization, ids, window)
