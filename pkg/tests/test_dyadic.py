"""
Tests for dyadic lattices, martingale differences and the energy identity
"""

import json
import math

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from src.dyadic import (
    base_scale_for,
    build_lattice,
    cube_mean,
    energy_identity,
    inner_product,
    martingale_delta,
    martingale_layer,
    neighbors,
)
from src.generators import gen_cantor4, gen_circle, gen_lipschitz_graph, gen_mixture, gen_plane
from src.measures import build_measure
from src.utils.errors import PreconditionError, ResolutionError, ValidationError


def deepest_generation(measure) -> int:
    """Finest generation whose side stays at or above h."""
    base = base_scale_for(measure.diameter)
    return int(math.floor(math.log2(base / measure.h))) - 1


@pytest.fixture(scope='module')
def cantor3():
    return gen_cantor4(3)


@pytest.fixture(scope='module')
def cantor3_lattice(cantor3):
    return build_lattice(cantor3, 0, 6, seed=4)


@pytest.fixture
def two_child_measure():
    points = [(0.1, 0.1), (0.3, 0.1)]
    return build_measure(points, [1.0, 3.0], 1, 2, 0.01)


GENERATORS = {
    'plane': lambda: gen_plane(1, 2, 1.0, 1 / 256),
    'graph': lambda: gen_lipschitz_graph(1, 2, 1.0, 1 / 256, profile='sinusoid', amplitude=0.1),
    'circle': lambda: gen_circle(1.0, 2000),
    'cantor4': lambda: gen_cantor4(5),
    'mixture': lambda: gen_mixture([gen_plane(1, 2, 1.0, 1 / 128), gen_cantor4(3)]),
}


class TestBuildLattice:
    """Translated dyadic grids restricted to the support"""

    def test_base_scale(self):
        assert base_scale_for(1.0) == 1.0
        assert base_scale_for(1.06) == 2.0
        assert base_scale_for(0.2) == 0.25
        assert base_scale_for(0.0) == 1.0

    def test_four_point_cantor(self):
        measure = gen_cantor4(1)
        lattice = build_lattice(measure, 1, 2, seed=3)
        assert lattice.base_scale == 2.0
        finest = lattice.generation(2)
        assert len(finest) == 4
        for cube in finest:
            assert len(cube.member_ids) == 1
            assert cube.mass == 0.25
            assert cube.side == 0.5

    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_partition_and_nesting(self, cantor3, seed):
        lattice = build_lattice(cantor3, 0, 6, seed=seed)
        for j in lattice.generations:
            cubes = lattice.generation(j)
            members = np.sort(np.concatenate([cube.member_ids for cube in cubes]))
            np.testing.assert_array_equal(members, np.arange(len(cantor3)))
            assert math.fsum(cube.mass for cube in cubes) == cantor3.total_mass
            for cube in cubes:
                assert cube.side == lattice.base_scale * 2.0 ** (-j)
                assert cube.mass == float(np.sum(cantor3.weights[cube.member_ids]))
                if cube.children:
                    children = np.sort(np.concatenate([lattice.cube(c).member_ids for c in cube.children]))
                    np.testing.assert_array_equal(children, cube.member_ids)
                if cube.parent is not None:
                    assert set(cube.member_ids) <= set(lattice.cube(cube.parent).member_ids)

    def test_same_seed_same_lattice(self, cantor3):
        first = build_lattice(cantor3, 0, 5, seed=9)
        second = build_lattice(cantor3, 0, 5, seed=9)
        assert first.to_dict() == second.to_dict()

    def test_interior_cubes_are_regular(self):
        measure = gen_plane(1, 2, 4.0, 1 / 1024)
        lattice = build_lattice(measure, 2, 6, seed=5)
        checked = 0
        for cube in lattice.cubes:
            box = lattice.cell_box(cube)
            if box.lower[0] >= 0 and box.upper[0] <= 4.0:
                assert 0.5 <= cube.mass_ratio <= 2.0
                assert not cube.ad_flag
                checked += 1
        assert checked > 50

    def test_j_max_below_j_min(self, cantor3):
        with pytest.raises(ValidationError):
            build_lattice(cantor3, 3, 2)

    def test_below_resolution(self, cantor3):
        with pytest.raises(ResolutionError) as excinfo:
            build_lattice(cantor3, 0, 12)
        assert excinfo.value.h == cantor3.h

    def test_dump_is_json(self, cantor3_lattice):
        dump = json.loads(json.dumps(cantor3_lattice.to_dict()))
        assert len(dump['cubes']) == len(cantor3_lattice)
        assert {'id', 'j', 'anchor', 'mass', 'parent', 'children', 'neighbors'} <= set(dump['cubes'][0])


class TestNeighbors:
    """Same-generation cubes within one side"""

    def test_self_included(self, cantor3_lattice):
        for cube in cantor3_lattice.cubes:
            assert cube.id in cube.neighbors
            assert cube in neighbors(cantor3_lattice, cube)

    def test_isolated_cubes(self):
        measure = build_measure([(0.0, 0.0), (0.01, 0.0), (4.0, 4.0), (4.01, 4.0)], [1, 1, 1, 1], 1, 2, 0.001)
        lattice = build_lattice(measure, 3, 4, offset=(0.25, 0.25))
        for cube in lattice.generation(4):
            assert cube.neighbors == [cube.id]

    def test_adjacent_cubes(self):
        measure = build_measure([(0.0, 0.0), (0.45, 0.0), (0.55, 0.0), (1.0, 0.0)], [1, 1, 1, 1], 1, 2, 0.01)
        lattice = build_lattice(measure, 1, 1, offset=(0.0, 0.0))
        cubes = lattice.generation(1)
        assert [cube.anchor for cube in cubes] == [(0, 0), (1, 0), (2, 0)]
        assert cubes[0].neighbors == [cubes[0].id, cubes[1].id]
        assert cubes[1].neighbors == [cubes[0].id, cubes[1].id, cubes[2].id]
        assert cubes[2].neighbors == [cubes[1].id, cubes[2].id]

    @pytest.mark.parametrize('seed', range(20))
    def test_brute_force_oracle(self, seed):
        rng = np.random.default_rng(seed)
        measure = build_measure(rng.uniform(0, 1, size=(60, 2)), rng.uniform(0.1, 1, 60), 1, 2, 1e-3)
        lattice = build_lattice(measure, 0, 4, seed=seed)
        for j in lattice.generations:
            cubes = lattice.generation(j)
            for a in cubes:
                for b in cubes:
                    close = cdist(measure.points[a.member_ids], measure.points[b.member_ids]).min() <= a.side
                    assert (b.id in a.neighbors) == close
                    assert (b.id in a.neighbors) == (a.id in b.neighbors)


class TestMartingale:
    """Cube means and martingale differences"""

    def test_constant_mean(self, cantor3_lattice):
        f = np.full(len(cantor3_lattice.measure), 2.5)
        for cube in cantor3_lattice.cubes:
            assert cube_mean(cantor3_lattice, f, cube) == 2.5

    def test_indicator_mean(self, cantor3_lattice):
        cube = cantor3_lattice.generation(2)[0]
        f = np.zeros(len(cantor3_lattice.measure))
        f[cube.member_ids] = 1.0
        assert cube_mean(cantor3_lattice, f, cube) == 1.0

    def test_hand_summed_mean(self):
        rng = np.random.default_rng(2)
        measure = build_measure(rng.uniform(0, 1, size=(10, 2)), rng.uniform(0.1, 1, 10), 1, 2, 1e-3)
        lattice = build_lattice(measure, 0, 0, seed=0)
        f = rng.normal(size=10)
        for cube in lattice.roots:
            members = cube.member_ids
            expected = sum(measure.weights[i] * f[i] for i in members) / sum(measure.weights[i] for i in members)
            assert cube_mean(lattice, f, cube) == pytest.approx(expected, rel=1e-14, abs=1e-15)

    def test_two_child_hand_computation(self, two_child_measure):
        lattice = build_lattice(two_child_measure, 0, 1, offset=(0.0, 0.0))
        root = lattice.roots[0]
        assert len(lattice.roots) == 1
        assert len(root.children) == 2
        f = np.array([4.0, 0.0])
        assert cube_mean(lattice, f, root) == 1.0
        np.testing.assert_array_equal(martingale_delta(lattice, f, root), [3.0, -1.0])

    def test_constant_delta_vanishes(self, cantor3_lattice):
        f = np.full(len(cantor3_lattice.measure), -1.25)
        for cube in cantor3_lattice.cubes:
            if not cube.is_leaf:
                np.testing.assert_array_equal(martingale_delta(cantor3_lattice, f, cube), 0.0)

    def test_delta_has_zero_integral(self, cantor3_lattice):
        rng = np.random.default_rng(7)
        f = rng.normal(size=len(cantor3_lattice.measure))
        weights = cantor3_lattice.measure.weights
        for cube in cantor3_lattice.cubes:
            if not cube.is_leaf:
                values = martingale_delta(cantor3_lattice, f, cube)
                assert abs(np.sum(weights[cube.member_ids] * values)) <= 1e-15

    def test_leaf_is_an_error(self, cantor3_lattice):
        f = np.zeros(len(cantor3_lattice.measure))
        with pytest.raises(PreconditionError):
            martingale_delta(cantor3_lattice, f, cantor3_lattice.leaves[0])

    def test_zero_mass_cube(self):
        measure = build_measure([(0.0, 0.0), (1.0, 1.0)], [0.0, 1.0], 1, 2, 0.01)
        lattice = build_lattice(measure, 2, 2, offset=(0.0, 0.0))
        empty = next(cube for cube in lattice.cubes if cube.mass == 0)
        with pytest.raises(PreconditionError):
            cube_mean(lattice, [1.0, 1.0], empty)

    def test_orthogonality(self, cantor3_lattice):
        rng = np.random.default_rng(12)
        inner = [cube.id for cube in cantor3_lattice.cubes if not cube.is_leaf]
        weights = cantor3_lattice.measure.weights
        for _ in range(10):
            f = rng.normal(size=len(cantor3_lattice.measure))
            norm = float(np.sum(weights * f ** 2))
            layer = martingale_layer(cantor3_lattice, f)
            for i, first in enumerate(inner):
                for second in inner[i + 1:]:
                    assert abs(inner_product(cantor3_lattice, layer, first, second)) <= 1e-10 * norm


class TestEnergyIdentity:
    """||f||^2 on R = mean term + martingale energies + leaf variance"""

    def test_constant_function(self, cantor3_lattice):
        f = np.full(len(cantor3_lattice.measure), 2.0)
        root = cantor3_lattice.roots[0]
        result = energy_identity(cantor3_lattice, f, root)
        assert result.rhs == pytest.approx(root.mass * 4.0, rel=1e-14)
        assert result.remainder == 0.0

    def test_singleton_leaves(self, cantor3_lattice):
        assert all(len(cube.member_ids) == 1 for cube in cantor3_lattice.leaves)
        rng = np.random.default_rng(3)
        f = rng.normal(size=len(cantor3_lattice.measure))
        for root in cantor3_lattice.roots:
            result = energy_identity(cantor3_lattice, f, root)
            assert result.remainder == 0.0
            assert result.lhs == pytest.approx(result.rhs, rel=1e-12)

    @pytest.mark.parametrize('name', sorted(GENERATORS))
    def test_generators(self, name):
        measure = GENERATORS[name]()
        lattice = build_lattice(measure, 0, deepest_generation(measure), seed=1)
        rng = np.random.default_rng(len(name))
        for _ in range(20):
            f = rng.normal(size=len(measure))
            for root in lattice.roots:
                result = energy_identity(lattice, f, root)
                assert result.holds(1e-10)
                assert abs(result.residual) <= 1e-10 * result.lhs
