"""
Geometry helpers: support diameter and bounding boxes of point clouds
"""

import logging
from typing import Tuple

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

logger = logging.getLogger(__name__)

# Below this size the diameter is computed from all pairwise distances
BRUTE_FORCE_LIMIT = 2048


def bounding_box(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return (lower, upper) corners of the axis-aligned bounding box."""
    if len(points) == 0:
        d = points.shape[1] if points.ndim == 2 else 0
        return np.zeros(d), np.zeros(d)
    return points.min(axis=0), points.max(axis=0)


def _polygon_diameter(vertices: np.ndarray) -> float:
    """Rotating calipers over a convex polygon given in counter-clockwise order."""
    m = len(vertices)
    if m == 1:
        return 0.0
    if m == 2:
        return float(np.linalg.norm(vertices[1] - vertices[0]))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    best = 0.0
    j = 1
    for i in range(m):
        ni = (i + 1) % m
        while cross(vertices[i], vertices[ni], vertices[(j + 1) % m]) > cross(vertices[i], vertices[ni], vertices[j]):
            j = (j + 1) % m
        best = max(
            best,
            float(np.linalg.norm(vertices[i] - vertices[j])),
            float(np.linalg.norm(vertices[ni] - vertices[j])),
        )
    return best


def support_diameter(points: np.ndarray) -> float:
    """
    Diameter of a finite point set (max pairwise Euclidean distance).

    Small sets use all pairs. Larger sets are reduced to their affine hull
    (SVD), then to convex hull vertices; planar hulls use rotating calipers.
    """
    count = len(points)
    if count < 2:
        return 0.0
    if count <= BRUTE_FORCE_LIMIT:
        return float(pdist(points).max())

    centered = points - points.mean(axis=0)
    _, singular_values, vt = np.linalg.svd(centered, full_matrices=False)
    if singular_values[0] == 0.0:
        return 0.0
    rank = int(np.sum(singular_values > singular_values[0] * 1e-12))
    coords = centered @ vt[:rank].T

    if rank == 1:
        return float(coords[:, 0].max() - coords[:, 0].min())

    hull = ConvexHull(coords)
    vertices = coords[hull.vertices]
    if rank == 2:
        return _polygon_diameter(vertices)

    logger.debug(f"Computing diameter over {len(vertices)} hull vertices in dimension {rank}")
    if len(vertices) <= BRUTE_FORCE_LIMIT * 4:
        return float(pdist(vertices).max())
    best = 0.0
    for start in range(0, len(vertices), BRUTE_FORCE_LIMIT):
        block = vertices[start:start + BRUTE_FORCE_LIMIT]
        diffs = block[:, None, :] - vertices[None, :, :]
        best = max(best, float(np.sqrt((diffs ** 2).sum(axis=2)).max()))
    return best
