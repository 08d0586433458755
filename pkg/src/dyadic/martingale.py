"""
Martingale differences over a dyadic lattice and the L2 energy identity
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from src.utils.errors import LengthMismatchError, PreconditionError
from .lattice import DyadicCube, DyadicLattice

logger = logging.getLogger(__name__)


def _values(lattice: DyadicLattice, f) -> np.ndarray:
    values = np.asarray(f, dtype=np.float64).reshape(-1)
    if len(values) != len(lattice.measure):
        raise LengthMismatchError(f"f has {len(values)} values for {len(lattice.measure)} support points")
    return values


def _mean(weights: np.ndarray, values: np.ndarray, members: np.ndarray) -> float:
    w = weights[members]
    mass = float(np.sum(w))
    if mass == 0:
        return 0.0
    return float(np.sum(w * values[members])) / mass


def cube_mean(lattice: DyadicLattice, f, cube: DyadicCube) -> float:
    """
    m_Q f = mu(Q)^-1 * integral over Q of f dmu.

    Raises:
        PreconditionError: mu(Q) = 0
    """
    values = _values(lattice, f)
    if cube.mass == 0:
        raise PreconditionError(f"Cube {cube.id} has zero mass, its mean is undefined")
    return _mean(lattice.measure.weights, values, cube.member_ids)


def _delta_values(lattice: DyadicLattice, values: np.ndarray, cube: DyadicCube) -> np.ndarray:
    weights = lattice.measure.weights
    parent_mean = _mean(weights, values, cube.member_ids)
    result = np.empty(len(cube.member_ids))
    for child_id in cube.children:
        child = lattice.cubes[child_id]
        # member lists are sorted and children partition the parent
        slots = np.searchsorted(cube.member_ids, child.member_ids)
        result[slots] = _mean(weights, values, child.member_ids) - parent_mean
    return result


def martingale_delta(lattice: DyadicLattice, f, cube: DyadicCube) -> np.ndarray:
    """
    Delta_Q f = sum over children P of chi_P (m_P f - m_Q f), as values on
    the members of Q in member_ids order.

    Raises:
        PreconditionError: Q is a leaf
    """
    values = _values(lattice, f)
    if cube.is_leaf:
        raise PreconditionError(
            f"Cube {cube.id} is a leaf (generation {cube.generation}); its variance is the energy remainder"
        )
    return _delta_values(lattice, values, cube)


@dataclass
class MartingaleLayer:
    """f with its cube means and the martingale differences of every non-leaf cube."""
    values: np.ndarray
    means: Dict[int, float] = field(default_factory=dict)
    deltas: Dict[int, np.ndarray] = field(default_factory=dict)


def martingale_layer(lattice: DyadicLattice, f) -> MartingaleLayer:
    values = _values(lattice, f)
    weights = lattice.measure.weights
    layer = MartingaleLayer(values)
    for cube in lattice.cubes:
        layer.means[cube.id] = _mean(weights, values, cube.member_ids)
        if not cube.is_leaf:
            layer.deltas[cube.id] = _delta_values(lattice, values, cube)
    return layer


def inner_product(lattice: DyadicLattice, layer: MartingaleLayer, first: int, second: int) -> float:
    """<Delta_Q f, Delta_Q' f> in L2(mu), over the common members."""
    a, b = lattice.cubes[first], lattice.cubes[second]
    common, in_a, in_b = np.intersect1d(a.member_ids, b.member_ids, assume_unique=True, return_indices=True)
    if len(common) == 0:
        return 0.0
    weights = lattice.measure.weights[common]
    return float(np.sum(weights * layer.deltas[first][in_a] * layer.deltas[second][in_b]))


@dataclass
class EnergyIdentity:
    """
    lhs = integral over R of f^2 dmu
    rhs = mu(R) (m_R f)^2 + sum over non-leaf Q in D(R) of ||Delta_Q f||^2
    remainder = within-leaf variance
    """
    lhs: float
    rhs: float
    remainder: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs - self.remainder

    def holds(self, rtol: float = 1e-10) -> bool:
        return abs(self.residual) <= rtol * max(abs(self.lhs), np.finfo(float).tiny)

    def as_tuple(self):
        return self.lhs, self.rhs, self.remainder


def energy_identity(lattice: DyadicLattice, f, root: DyadicCube) -> EnergyIdentity:
    """Both sides of the L2 energy identity on the cube tree below root."""
    values = _values(lattice, f)
    weights = lattice.measure.weights
    members = root.member_ids
    lhs = math.fsum(weights[members] * values[members] ** 2)
    root_mean = _mean(weights, values, members)
    terms = [root.mass * root_mean ** 2]
    remainder_terms = []
    for cube in lattice.descendants(root.id):
        w = weights[cube.member_ids]
        if cube.is_leaf:
            centered = values[cube.member_ids] - _mean(weights, values, cube.member_ids)
            remainder_terms.append(math.fsum(w * centered ** 2))
        else:
            terms.append(math.fsum(w * _delta_values(lattice, values, cube) ** 2))
    result = EnergyIdentity(lhs, math.fsum(terms), math.fsum(remainder_terms))
    if not result.holds():
        logger.warning(f"Energy identity residual {result.residual:.3g} on cube {root.id}")
    return result
