"""
Calderon-Zygmund decomposition of a signed measure against a reference measure

For lambda > 2^(d+1) ||nu|| / ||mu|| the decomposition returns cubes Q_j with
|nu|(Q_j) > 2^(-d-1) lambda mu(2Q_j), a good density g and bad parts
beta_j = w_j nu - b_j mu with zero mean, so that nu = g mu + sum_j beta_j.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.measures.core import DiscreteMeasure, SignedMeasure, total_variation
from src.utils.errors import AuditFailureError, PreconditionError, ValidationError

logger = logging.getLogger(__name__)

# Dilations of the stopping condition that the audit checks
AUDIT_ETAS = (2.5, 3.0, 4.0, 8.0, 16.0)

# R_j = BAD_SUPPORT_DILATION * Q_j
BAD_SUPPORT_DILATION = 6.0


@dataclass
class CZCube:
    """
    Closed cube of side `side` centered at a support point of mu.

    Attributes:
        index: j
        point_id: mu support point at the center
        center: coordinates of the center
        side: l(Q_j)
        members: mu support points in Q_j
        bad_support: mu support points with positive weight in R_j = 6 Q_j
    """
    index: int
    point_id: int
    center: np.ndarray
    side: float
    members: np.ndarray
    bad_support: np.ndarray

    @property
    def half_side(self) -> float:
        return self.side / 2

    def to_dict(self) -> dict:
        return {
            'index': self.index,
            'point_id': self.point_id,
            'center': self.center.tolist(),
            'side': self.side,
            'members': len(self.members),
            'bad_support': len(self.bad_support),
        }


@dataclass
class CZDecomposition:
    """
    Result of cz_decompose. Arrays indexed by mu support points.

    Attributes:
        lam: threshold lambda
        cubes: selected cubes Q_j
        nu_weights: net signed nu weight at each mu support point
        density: f = dnu/dmu (0 where mu has no weight)
        overlap: number of cubes containing each point
        weights: w_j on the members of Q_j, in member order
        b_constants: value of b_j on R_j
        good: g, with nu = g mu + sum_j (w_j nu - b_j mu)
        audit: report of the checks run by cz_decompose
    """
    lam: float
    cubes: List[CZCube]
    nu_weights: np.ndarray
    density: np.ndarray
    overlap: np.ndarray
    weights: Dict[int, np.ndarray] = field(default_factory=dict)
    b_constants: List[float] = field(default_factory=list)
    good: np.ndarray = field(default_factory=lambda: np.zeros(0))
    audit: Optional[object] = None

    @property
    def is_empty(self) -> bool:
        return not self.cubes

    @property
    def covered(self) -> np.ndarray:
        return self.overlap > 0

    def bad_integral(self, j: int) -> float:
        """integral of w_j dnu."""
        cube = self.cubes[j]
        return math.fsum(self.weights[j] * self.nu_weights[cube.members])

    def bad_values(self, j: int, size: int) -> np.ndarray:
        """b_j as an array over all mu support points."""
        values = np.zeros(size)
        values[self.cubes[j].bad_support] = self.b_constants[j]
        return values

    def to_dict(self) -> dict:
        return {
            'lambda': self.lam,
            'cube_count': len(self.cubes),
            'cubes': [
                dict(cube.to_dict(), b_constant=self.b_constants[cube.index],
                     bad_integral=self.bad_integral(cube.index))
                for cube in self.cubes
            ],
            'max_overlap': int(self.overlap.max()) if len(self.overlap) else 0,
            'good_sup': float(np.max(np.abs(self.good))) if len(self.good) else 0.0,
        }


def hypothesis_bound(nu: SignedMeasure, measure: DiscreteMeasure) -> float:
    """2^(d+1) ||nu|| / ||mu||."""
    return 2.0 ** (measure.d + 1) * total_variation(nu) / measure.total_mass


def net_weights(nu: SignedMeasure, measure: DiscreteMeasure) -> np.ndarray:
    """
    Signed nu weight carried by each mu support point.

    Raises:
        ValidationError: a nu atom is not a mu support point of positive weight
    """
    if nu.d != measure.d:
        raise ValidationError(f"nu lives in dimension {nu.d}, mu in {measure.d}")
    slots: Dict[tuple, int] = {}
    for i, (point, weight) in enumerate(zip(measure.points, measure.weights)):
        if weight > 0:
            slots.setdefault(tuple(point), i)
    points, weights = nu.atoms()
    result = np.zeros(len(measure))
    for point, weight in zip(points, weights):
        slot = slots.get(tuple(point))
        if slot is None:
            raise ValidationError(
                f"nu atom at {point.tolist()} is not a support point of mu with positive weight"
            )
        result[slot] += weight
    return result


def _cube_side(x: np.ndarray, points: np.ndarray, abs_nu: np.ndarray, mu_weights: np.ndarray,
               threshold: float) -> float:
    """
    Side l with |nu|(Q(x, l)) > threshold * mu(Q(x, 2l)) such that the inequality
    fails for every larger concentric cube.

    Both sides are step functions of l: |nu|(Q(x, l)) jumps at l = 2t_i and
    mu(Q(x, 2l)) at l = t_i, t_i the sup-distance to x. The side is the
    midpoint of the last interval where the inequality holds.
    """
    t = np.abs(points - x).max(axis=1)
    nu_order = np.argsort(t, kind='stable')
    t_sorted = t[nu_order]
    nu_cumulative = np.concatenate([[0.0], np.cumsum(abs_nu[nu_order])])
    mu_cumulative = np.concatenate([[0.0], np.cumsum(mu_weights[nu_order])])

    positive_t = t_sorted[t_sorted > 0]
    breaks = np.unique(np.concatenate([2 * positive_t[abs_nu[nu_order][t_sorted > 0] > 0], positive_t]))
    # one representative per interval: (0, b_0), [b_0, b_1), ...
    representatives = np.concatenate([[breaks[0] / 2 if len(breaks) else 1.0], breaks])
    nu_mass = nu_cumulative[np.searchsorted(t_sorted, representatives / 2, side='right')]
    mu_mass = mu_cumulative[np.searchsorted(t_sorted, representatives, side='right')]
    holds = nu_mass > threshold * mu_mass

    last = int(np.nonzero(holds)[0].max())
    if last == len(breaks):
        raise PreconditionError("Stopping condition holds at every scale; lambda is below the hypothesis bound")
    if last == 0:
        return float(breaks[0] / 2)
    return float((breaks[last - 1] + breaks[last]) / 2)


def _select(candidates: Sequence[int], sides: Dict[int, float], points: np.ndarray) -> List[int]:
    """Largest cubes first; a cube is kept when no kept cube contains its center."""
    order = sorted(candidates, key=lambda i: (-sides[i], i))
    kept: List[int] = []
    for i in order:
        x = points[i]
        if any(np.abs(x - points[k]).max() <= sides[k] / 2 for k in kept):
            continue
        kept.append(i)
    return kept


def cz_decompose(nu: SignedMeasure, measure: DiscreteMeasure, lam: float, strict: bool = True,
                 etas: Sequence[float] = AUDIT_ETAS, constant_limit: Optional[float] = None) -> CZDecomposition:
    """
    Calderon-Zygmund decomposition of nu at level lam against mu, audited.

    Args:
        nu: signed measure whose atoms are mu support points
        measure: reference measure mu
        lam: level, above 2^(d+1) ||nu|| / ||mu||
        strict: raise AuditFailureError when a clause fails
        etas: dilations checked for the stopping condition
        constant_limit: largest acceptable measured constant

    Raises:
        PreconditionError: lam at or below the hypothesis bound
        ValidationError: nu atom off the support, empty mu, lam <= 0
        AuditFailureError: strict and the audit failed
    """
    from .audit import cz_audit

    lam = float(lam)
    if not lam > 0:
        raise ValidationError(f"lambda must be > 0, got {lam}")
    if measure.is_empty or measure.total_mass == 0:
        raise ValidationError("The reference measure mu must have positive mass")
    bound = hypothesis_bound(nu, measure)
    if lam <= bound:
        raise PreconditionError(f"lambda = {lam:g} must exceed 2^(d+1)||nu||/||mu|| = {bound:g}")

    nu_weights = net_weights(nu, measure)
    mu_weights = measure.weights
    density = np.divide(nu_weights, mu_weights, out=np.zeros_like(nu_weights), where=mu_weights > 0)
    abs_nu = np.abs(nu_weights)
    points = measure.points
    threshold = 2.0 ** (-measure.d - 1) * lam

    candidates = [int(i) for i in np.nonzero(np.abs(density) > lam)[0]]
    sides = {i: _cube_side(points[i], points, abs_nu, mu_weights, threshold) for i in candidates}
    selected = _select(candidates, sides, points)

    index = measure.index
    cubes: List[CZCube] = []
    overlap = np.zeros(len(measure), dtype=np.int64)
    for j, i in enumerate(selected):
        side = sides[i]
        members = index.cube_members(points[i], side / 2)
        dilated = index.cube_members(points[i], BAD_SUPPORT_DILATION * side / 2)
        cubes.append(CZCube(j, i, points[i].copy(), side, members, dilated[mu_weights[dilated] > 0]))
        overlap[members] += 1

    weights: Dict[int, np.ndarray] = {}
    b_constants: List[float] = []
    good = np.where(overlap == 0, density, 0.0)
    for cube in cubes:
        weights[cube.index] = 1.0 / overlap[cube.members]
        bad_mass = math.fsum(mu_weights[cube.bad_support])
        constant = math.fsum(weights[cube.index] * nu_weights[cube.members]) / bad_mass
        b_constants.append(constant)
        good[cube.bad_support] += constant

    decomposition = CZDecomposition(
        lam=lam,
        cubes=cubes,
        nu_weights=nu_weights,
        density=density,
        overlap=overlap,
        weights=weights,
        b_constants=b_constants,
        good=good,
    )
    logger.info(f"CZ decomposition at lambda = {lam:g}: {len(candidates)} candidates, {len(cubes)} cubes")

    report = cz_audit(decomposition, nu, measure, etas=etas, constant_limit=constant_limit)
    decomposition.audit = report
    if strict and not report.passed:
        failed = ', '.join(report.failed_clauses)
        logger.error(f"CZ audit failed at lambda = {lam:g}: {failed}")
        raise AuditFailureError(f"CZ audit failed: {failed}", decomposition=decomposition, report=report)
    return decomposition
