"""
Tests for the square-function operator T and its weak-(1,1) statistic
"""

import numpy as np
import pytest

from src.density import ScaleGrid, make_scale_grid, operator_T, operator_T_mu, weak_11_statistic
from src.generators import gen_plane
from src.measures import signed_measure, zero_measure
from src.measures.core import SignedMeasure
from src.utils.errors import ValidationError


@pytest.fixture(scope='module')
def segment():
    return gen_plane(n=1, d=2, L=4, s=0.005)


@pytest.fixture(scope='module')
def random_nu(segment):
    rng = np.random.default_rng(23)
    ids = rng.choice(len(segment), size=50, replace=False)
    return signed_measure(segment.points[ids], rng.normal(size=50), 1, 2, segment.h)


@pytest.fixture
def atom_grid():
    return ScaleGrid.from_bounds(4.0, 0.25, 4)


class TestOperatorT:
    """T nu(x) from signed ball masses over the grid"""

    def test_zero_measure(self, atom_grid):
        nu = SignedMeasure(zero_measure(1, 2), zero_measure(1, 2))
        values = operator_T(nu, [(0, 0), (1, 1)], atom_grid)
        np.testing.assert_array_equal(values, [0.0, 0.0])

    def test_single_atom_closed_form(self, atom_grid):
        a = 0.7
        nu = signed_measure([(1.0, 0.0)], [a], 1, 2, 1e-6)
        expected = 0.0
        for r, w in zip(atom_grid.radii, atom_grid.log_weights):
            inner = a if r >= 1 else 0.0
            outer = a if 2 * r >= 1 else 0.0
            expected += (inner / r - outer / (2 * r)) ** 2 * w
        value = operator_T(nu, [(0.0, 0.0)], atom_grid)[0]
        assert value == pytest.approx(np.sqrt(expected), rel=1e-12)
        assert value > 0

    def test_homogeneity(self, random_nu, segment):
        grid = ScaleGrid.from_bounds(1.0, 0.05, 4)
        points = segment.points[::40]
        base = operator_T(random_nu, points, grid)
        np.testing.assert_array_equal(operator_T(random_nu.scaled(2.0), points, grid), 2 * base)
        np.testing.assert_array_equal(operator_T(random_nu.scaled(-1.0), points, grid), base)

    def test_density_form(self, segment):
        grid = ScaleGrid.from_bounds(1.0, 0.05, 4)
        f = np.zeros(len(segment))
        np.testing.assert_array_equal(operator_T_mu(segment, f, segment.points[:5], grid), np.zeros(5))


class TestWeakType:
    """sup over lambda of lambda * mu{T nu > lambda} / ||nu||"""

    def test_requires_lambdas(self, segment, random_nu):
        grid = ScaleGrid.from_bounds(1.0, 0.05, 4)
        with pytest.raises(ValidationError):
            weak_11_statistic(segment, random_nu, grid, [])
        with pytest.raises(ValidationError):
            weak_11_statistic(segment, random_nu, grid, [1.0, -2.0])

    def test_zero_measure(self, segment):
        grid = ScaleGrid.from_bounds(1.0, 0.05, 4)
        nu = SignedMeasure(zero_measure(1, 2), zero_measure(1, 2))
        assert weak_11_statistic(segment, nu, grid, [1.0]).statistic == 0.0

    def test_scale_invariance(self, segment, random_nu):
        grid = ScaleGrid.from_bounds(1.0, 0.05, 4)
        lambdas = [0.5, 1.0, 2.0, 4.0]
        base = weak_11_statistic(segment, random_nu, grid, lambdas)
        doubled = weak_11_statistic(segment, random_nu.scaled(2.0), grid, [2 * v for v in lambdas])
        assert doubled.statistic == base.statistic

    def test_stable_under_refinement(self, segment, random_nu):
        reference_grid = make_scale_grid(segment, octaves=8, m=4)
        T_reference = operator_T(random_nu, segment.points, reference_grid)
        lambdas = np.percentile(T_reference, [50, 60, 70, 80, 90, 95])
        statistics = []
        for m in (2, 4, 8):
            grid = make_scale_grid(segment, octaves=8, m=m)
            result = weak_11_statistic(segment, random_nu, grid, lambdas)
            assert np.isfinite(result.statistic)
            statistics.append(result.statistic)
        center = statistics[1]
        for value in statistics:
            assert abs(value - center) <= 0.25 * center
