"""
Ball Query Index - closed-ball weight sums over a weighted point cloud

The kd-tree only prefilters candidates. Membership is decided by the same
numpy expression a brute-force scan would use and the surviving weights are
summed in index order, so indexed and brute-force masses agree bit for bit.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

logger = logging.getLogger(__name__)

# Relative slack on the prefilter radius; exact membership is re-tested afterwards
PREFILTER_SLACK = 1e-9


def brute_force_ball_mass(points: np.ndarray, weights: np.ndarray, x: np.ndarray, r: float) -> float:
    """Reference sum of weights with |x_i - x| <= r, in index order."""
    if len(points) == 0:
        return 0.0
    mask = np.linalg.norm(points - x, axis=1) <= r
    return float(np.sum(weights[mask]))


class BallQueryIndex:
    """Spatial index answering closed-ball weight sums."""

    def __init__(self, points: np.ndarray, weights: np.ndarray):
        self._points = points
        self._weights = weights
        self._tree = cKDTree(points) if len(points) > 0 else None

    @property
    def tree(self) -> Optional[cKDTree]:
        return self._tree

    def candidates(self, x: np.ndarray, r: float, p: float = 2.0) -> np.ndarray:
        """Sorted indices of points that may lie in the closed ball B_p(x, r)."""
        if self._tree is None:
            return np.zeros(0, dtype=np.int64)
        radius = r * (1.0 + PREFILTER_SLACK) + np.finfo(float).tiny
        idx = self._tree.query_ball_point(x, radius, p=p)
        return np.sort(np.asarray(idx, dtype=np.int64))

    def members(self, x: np.ndarray, r: float) -> np.ndarray:
        """Sorted indices of points with |x_i - x| <= r (Euclidean, closed)."""
        idx = self.candidates(x, r)
        if len(idx) == 0:
            return idx
        dist = np.linalg.norm(self._points[idx] - x, axis=1)
        return idx[dist <= r]

    def cube_members(self, center: np.ndarray, half_side: float) -> np.ndarray:
        """Sorted indices of points with |x_i - center|_inf <= half_side (closed cube)."""
        idx = self.candidates(center, half_side, p=np.inf)
        if len(idx) == 0:
            return idx
        dist = np.abs(self._points[idx] - center).max(axis=1)
        return idx[dist <= half_side]

    def ball_mass(self, x: np.ndarray, r: float) -> float:
        """Closed-ball mass mu(B(x, r))."""
        return float(self.ball_masses(x, [r])[0])

    def ball_masses(self, x: np.ndarray, radii: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        """
        Closed-ball masses for several radii around one point.

        Every mass is an index-order np.sum over the member weights, identical
        to a brute-force scan with the same radius.
        """
        radii = np.asarray(radii, dtype=np.float64)
        out = np.zeros(len(radii), dtype=np.float64)
        if self._tree is None or len(radii) == 0:
            return out
        idx = self.candidates(x, float(radii.max()))
        if len(idx) == 0:
            return out
        dist = np.linalg.norm(self._points[idx] - x, axis=1)
        weights = self._weights[idx]
        for k, r in enumerate(radii):
            out[k] = np.sum(weights[dist <= r])
        return out


class RadialProfile:
    """
    Cumulative mass as a function of distance from a fixed point.

    Sorting once makes thousands of radii cheap. Sums follow distance order,
    so values may differ from BallQueryIndex.ball_masses in the last bits.
    """

    def __init__(self, distances: np.ndarray, weights: np.ndarray):
        order = np.argsort(distances, kind='stable')
        self.distances = distances[order]
        self.cumulative = np.concatenate(([0.0], np.cumsum(weights[order])))

    @classmethod
    def around(cls, points: np.ndarray, weights: np.ndarray, x: np.ndarray,
               index: Optional[BallQueryIndex] = None, r_max: Optional[float] = None) -> 'RadialProfile':
        """Build the profile of the measure around x, optionally truncated at r_max."""
        if index is not None and r_max is not None:
            idx = index.candidates(x, r_max)
            dist = np.linalg.norm(points[idx] - x, axis=1)
            return cls(dist, weights[idx])
        dist = np.linalg.norm(points - x, axis=1) if len(points) else np.zeros(0)
        return cls(dist, weights)

    def masses(self, radii: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        """Closed-ball masses for the given radii."""
        positions = np.searchsorted(self.distances, np.asarray(radii, dtype=np.float64), side='right')
        return self.cumulative[positions]
