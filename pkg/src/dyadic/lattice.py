"""
Dyadic lattices - randomly translated dyadic grids restricted to the support of a measure
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from src.measures.core import Box, DiscreteMeasure
from src.measures.geometry import bounding_box, support_diameter
from src.utils.errors import PreconditionError, ResolutionError, ValidationError

logger = logging.getLogger(__name__)

# mu(Q) / l(Q)^n outside [1/c, c] flags a cube
DEFAULT_AD_CONSTANT = 2.0


@dataclass
class DyadicCube:
    """
    One cube of the lattice: the support points of a translated grid cell.

    Attributes:
        id: position in DyadicLattice.cubes (generation first, then anchor)
        generation: j, with side = 2^-j * base_scale
        side: grid side l(Q)
        anchor: integer cell coordinates at this generation
        member_ids: sorted indices of the support points in the cube
        mass: sum of member weights
        parent: id of the cube one generation up, None at j_min
        children: ids one generation down, empty at j_max
        neighbors: same-generation cubes with a member pair within l(Q), self included
        mass_ratio: mu(Q) / l(Q)^n
        ad_flag: mass_ratio outside [1/c, c]
        member_spread: diameter of the member points
    """
    id: int
    generation: int
    side: float
    anchor: Tuple[int, ...]
    member_ids: np.ndarray
    mass: float
    parent: Optional[int] = None
    children: List[int] = field(default_factory=list)
    neighbors: List[int] = field(default_factory=list)
    mass_ratio: float = 0.0
    ad_flag: bool = False
    member_spread: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def to_dict(self) -> dict:
        return {
            'id': self.id,
            'j': self.generation,
            'side': self.side,
            'anchor': list(self.anchor),
            'mass': self.mass,
            'parent': self.parent,
            'children': list(self.children),
            'neighbors': list(self.neighbors),
            'members': len(self.member_ids),
            'mass_ratio': self.mass_ratio,
            'ad_flag': self.ad_flag,
            'member_spread': self.member_spread,
        }


class DyadicLattice:
    """Nested partitions of supp(mu) for generations j_min..j_max."""

    def __init__(self, measure: DiscreteMeasure, j_min: int, j_max: int, base_scale: float,
                 offset: np.ndarray, origin: np.ndarray, cubes: List[DyadicCube], ad_constant: float):
        self.measure = measure
        self.j_min = j_min
        self.j_max = j_max
        self.base_scale = base_scale
        self.offset = offset
        self.origin = origin
        self.cubes = cubes
        self.ad_constant = ad_constant
        self._by_generation: Dict[int, List[int]] = {j: [] for j in range(j_min, j_max + 1)}
        for cube in cubes:
            self._by_generation[cube.generation].append(cube.id)

    def __len__(self) -> int:
        return len(self.cubes)

    def __repr__(self) -> str:
        return (f"DyadicLattice(j={self.j_min}..{self.j_max}, base_scale={self.base_scale:g}, "
                f"cubes={len(self.cubes)})")

    @property
    def generations(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def side(self, j: int) -> float:
        return self.base_scale * 2.0 ** (-j)

    def cube(self, cube_id: int) -> DyadicCube:
        if not 0 <= cube_id < len(self.cubes):
            raise ValidationError(f"No cube with id {cube_id} (lattice has {len(self.cubes)})")
        return self.cubes[cube_id]

    def generation(self, j: int) -> List[DyadicCube]:
        if j not in self._by_generation:
            raise ValidationError(f"Generation {j} outside {self.j_min}..{self.j_max}")
        return [self.cubes[i] for i in self._by_generation[j]]

    @property
    def roots(self) -> List[DyadicCube]:
        return self.generation(self.j_min)

    @property
    def leaves(self) -> List[DyadicCube]:
        return self.generation(self.j_max)

    def cube_of(self, point_id: int, j: int) -> DyadicCube:
        """The generation-j cube containing a support point."""
        for cube in self.generation(j):
            position = np.searchsorted(cube.member_ids, point_id)
            if position < len(cube.member_ids) and cube.member_ids[position] == point_id:
                return cube
        raise ValidationError(f"Point {point_id} is not in the support")

    def descendants(self, cube_id: int) -> List[DyadicCube]:
        """D(R): the cube and every cube below it, generation by generation."""
        result = []
        frontier = [cube_id]
        while frontier:
            result.extend(self.cubes[i] for i in frontier)
            frontier = [child for i in frontier for child in self.cubes[i].children]
        return result

    def cell_box(self, cube: DyadicCube) -> Box:
        """The closed grid cell behind a cube (members lie in its half-open version)."""
        lower = self.origin - self.offset + np.asarray(cube.anchor, dtype=np.float64) * cube.side
        return Box(tuple(lower), tuple(lower + cube.side))

    @property
    def flagged(self) -> List[DyadicCube]:
        return [cube for cube in self.cubes if cube.ad_flag]

    def to_dict(self) -> dict:
        return {
            'j_min': self.j_min,
            'j_max': self.j_max,
            'base_scale': self.base_scale,
            'offset': self.offset.tolist(),
            'ad_constant': self.ad_constant,
            'cubes': [cube.to_dict() for cube in self.cubes],
        }


def base_scale_for(diameter: float) -> float:
    """Smallest power of 2 that is >= diameter (1 for a single point)."""
    if diameter <= 0:
        return 1.0
    exponent = math.ceil(math.log2(diameter))
    scale = 2.0 ** exponent
    if scale < diameter:
        scale *= 2.0
    return scale


def _group_by_anchor(anchors: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray]]:
    """Unique anchors in lexicographic order and the sorted member indices of each."""
    unique, inverse = np.unique(anchors, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(inverse, kind='stable')
    bounds = np.searchsorted(inverse[order], np.arange(len(unique) + 1))
    return unique, [order[bounds[k]:bounds[k + 1]] for k in range(len(unique))]


def _link_neighbors(cubes: List[DyadicCube], points: np.ndarray, side: float) -> None:
    """Same-generation cubes whose members come within one side of each other."""
    lookup = {cube.anchor: cube for cube in cubes}
    trees: Dict[int, cKDTree] = {}
    d = points.shape[1]
    steps = [step for step in product((-1, 0, 1), repeat=d) if any(step)]

    for cube in cubes:
        cube.neighbors = [cube.id]
    for cube in cubes:
        for step in steps:
            other = lookup.get(tuple(a + s for a, s in zip(cube.anchor, step)))
            # each unordered pair is decided once
            if other is None or other.id < cube.id:
                continue
            if other.id not in trees:
                trees[other.id] = cKDTree(points[other.member_ids])
            distances, _ = trees[other.id].query(points[cube.member_ids], k=1)
            if float(np.min(distances)) <= side:
                cube.neighbors.append(other.id)
                other.neighbors.append(cube.id)
    for cube in cubes:
        cube.neighbors.sort()


def build_lattice(measure: DiscreteMeasure, j_min: int, j_max: int, seed: Optional[int] = 0,
                  offset: Optional[Sequence[float]] = None,
                  ad_constant: float = DEFAULT_AD_CONSTANT) -> DyadicLattice:
    """
    Dyadic cubes of sides 2^-j * base_scale, j = j_min..j_max, over supp(mu).

    The grid is translated by a seeded offset in [0, base_scale)^d; empty cells
    are dropped. Generation j+1 anchors halve to generation j anchors exactly,
    so children partition their parent.

    Args:
        measure: the measure whose support is partitioned
        j_min: coarsest generation
        j_max: finest generation
        seed: seed of the translation offset
        offset: explicit translation, overrides seed
        ad_constant: c of the mu(Q) ~ l(Q)^n flag

    Raises:
        ValidationError: j_max < j_min or an empty measure
        ResolutionError: the finest side is below h
    """
    j_min, j_max = int(j_min), int(j_max)
    if j_max < j_min:
        raise ValidationError(f"j_max = {j_max} is below j_min = {j_min}")
    if measure.is_empty:
        raise ValidationError("Cannot build a lattice over an empty measure")
    if ad_constant < 1:
        raise ValidationError(f"ad_constant must be >= 1, got {ad_constant}")

    points = measure.points
    d, n = measure.d, measure.n
    base_scale = base_scale_for(support_diameter(points))
    finest = base_scale * 2.0 ** (-j_max)
    if finest < measure.h:
        raise ResolutionError(
            f"Insufficient resolution: finest cube side 2^-{j_max} * {base_scale:g} = {finest:g} "
            f"is below h = {measure.h:g}",
            r_min=finest, h=measure.h,
        )

    if offset is None:
        shift = np.random.default_rng(seed).uniform(0.0, base_scale, size=d)
    else:
        shift = np.asarray(offset, dtype=np.float64).reshape(-1)
        if shift.shape != (d,):
            raise ValidationError(f"offset needs {d} coordinates, got {shift.shape[0]}")
    origin, _ = bounding_box(points)
    origin = np.asarray(origin, dtype=np.float64)

    # sides are powers of two times base_scale, so the divisions are exact
    leaf_anchors = np.floor((points - origin + shift) / finest).astype(np.int64)

    cubes: List[DyadicCube] = []
    previous: Dict[Tuple[int, ...], int] = {}
    for j in range(j_min, j_max + 1):
        side = base_scale * 2.0 ** (-j)
        anchors = leaf_anchors >> (j_max - j)
        unique, members = _group_by_anchor(anchors)
        generation: List[DyadicCube] = []
        current: Dict[Tuple[int, ...], int] = {}
        for anchor_row, member_ids in zip(unique, members):
            anchor = tuple(int(a) for a in anchor_row)
            mass = float(np.sum(measure.weights[member_ids]))
            ratio = mass / side ** n
            cube = DyadicCube(
                id=len(cubes),
                generation=j,
                side=side,
                anchor=anchor,
                member_ids=member_ids,
                mass=mass,
                mass_ratio=ratio,
                ad_flag=not (1.0 / ad_constant <= ratio <= ad_constant),
                member_spread=support_diameter(points[member_ids]),
            )
            if j > j_min:
                parent = cubes[previous[tuple(a >> 1 for a in anchor)]]
                cube.parent = parent.id
                parent.children.append(cube.id)
            current[anchor] = cube.id
            cubes.append(cube)
            generation.append(cube)
        _link_neighbors(generation, points, side)
        previous = current

    lattice = DyadicLattice(measure, j_min, j_max, base_scale, shift, origin, cubes, ad_constant)
    logger.info(
        f"Built dyadic lattice j={j_min}..{j_max} over {len(measure)} points: "
        f"{len(cubes)} cubes, {len(lattice.flagged)} outside the AD band"
    )
    return lattice


def neighbors(lattice: DyadicLattice, cube: DyadicCube) -> List[DyadicCube]:
    """N(Q): same-generation cubes with a member pair within l(Q), Q included."""
    own = lattice.cube(cube.id)
    if own.generation != cube.generation or own.anchor != cube.anchor:
        raise PreconditionError(f"Cube {cube.id} does not belong to this lattice")
    return [lattice.cubes[i] for i in own.neighbors]
