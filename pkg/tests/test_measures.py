"""
Tests for discrete measures, ball-mass queries and measure files
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from src.measures import (
    Ball,
    Box,
    SignedMeasure,
    ball_mass,
    ball_masses,
    brute_force_ball_mass,
    build_measure,
    density_signed_measure,
    read_measure,
    read_signed_measure,
    restrict,
    signed_ball_mass,
    signed_measure,
    support_diameter,
    total_variation,
    write_measure,
    write_signed_measure,
    zero_measure,
)
from src.utils.errors import (
    DimensionError,
    FormatError,
    LengthMismatchError,
    NegativeWeightError,
    ValidationError,
)


@pytest.fixture
def unit_atom():
    return build_measure([(0.0, 0.0)], [1.0], n=1, d=2, h=1.0)


@pytest.fixture
def segment():
    """10^4 grid points on [0, 1] x {0}, weight 1e-4 each."""
    xs = np.arange(10_000) / 10_000
    points = np.column_stack([xs, np.zeros_like(xs)])
    return build_measure(points, np.full(10_000, 1e-4), n=1, d=2, h=1e-4)


@pytest.fixture
def random_cloud():
    rng = np.random.default_rng(7)
    points = rng.uniform(-1, 1, size=(3000, 2))
    weights = rng.uniform(0, 1, size=3000)
    return build_measure(points, weights, n=1, d=2, h=0.01)


class TestBuildMeasure:
    """Construction and validation"""

    def test_single_atom(self, unit_atom):
        assert unit_atom.total_mass == 1.0
        assert unit_atom.n == 1 and unit_atom.d == 2

    def test_zero_measure(self):
        measure = build_measure([], [], 1, 2, 1.0)
        assert measure.total_mass == 0
        assert len(measure) == 0
        assert measure.ball_mass((0, 0), 5.0) == 0.0

    def test_segment_total_mass(self, segment):
        assert abs(segment.total_mass - 1.0) <= 1e4 * np.finfo(float).eps

    def test_arrays_are_read_only(self, unit_atom):
        with pytest.raises(ValueError):
            unit_atom.weights[0] = 2.0
        with pytest.raises(ValueError):
            unit_atom.points[0, 0] = 2.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            build_measure([(0, 0), (1, 1)], [1.0], 1, 2, 1.0)

    def test_negative_weight(self):
        with pytest.raises(NegativeWeightError):
            build_measure([(0, 0)], [-1.0], 1, 2, 1.0)

    def test_n_greater_than_d(self):
        with pytest.raises(DimensionError):
            build_measure([(0, 0)], [1.0], 3, 2, 1.0)

    def test_errors_are_distinct(self):
        assert len({LengthMismatchError, NegativeWeightError, DimensionError}) == 3
        for error in (LengthMismatchError, NegativeWeightError, DimensionError):
            assert issubclass(error, ValidationError)

    def test_nonpositive_resolution(self):
        with pytest.raises(ValidationError):
            build_measure([(0, 0)], [1.0], 1, 2, 0.0)

    def test_nan_coordinate_rejected(self):
        with pytest.raises(ValidationError):
            build_measure([(np.nan, 0)], [1.0], 1, 2, 1.0)


class TestBallMass:
    """Closed-ball mass queries"""

    def test_center_included_at_zero_radius(self, unit_atom):
        assert ball_mass(unit_atom, (0, 0), 0.0) == 1.0

    def test_atom_outside(self):
        measure = build_measure([(1.0, 0.0)], [1.0], 1, 2, 1.0)
        assert ball_mass(measure, (0, 0), 0.5) == 0.0

    def test_boundary_point_is_inside(self):
        measure = build_measure([(1.0, 0.0)], [1.0], 1, 2, 1.0)
        assert ball_mass(measure, (0, 0), 1.0) == 1.0

    def test_negative_radius(self, unit_atom):
        with pytest.raises(ValidationError):
            ball_mass(unit_atom, (0, 0), -0.1)

    def test_nan_query(self, unit_atom):
        with pytest.raises(ValidationError):
            ball_mass(unit_atom, (np.nan, 0), 1.0)

    def test_wrong_query_dimension(self, unit_atom):
        with pytest.raises(DimensionError):
            ball_mass(unit_atom, (0, 0, 0), 1.0)

    def test_index_matches_brute_force_bit_exactly(self, random_cloud):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            x = rng.uniform(-1.2, 1.2, size=2)
            r = rng.uniform(0, 1.5)
            indexed = ball_mass(random_cloud, x, r)
            brute = brute_force_ball_mass(random_cloud.points, random_cloud.weights, x, r)
            assert indexed == brute

    def test_batched_radii_match_single_queries(self, random_cloud):
        radii = [0.05, 0.1, 0.4, 0.8]
        x = np.array([0.1, -0.2])
        batched = ball_masses(random_cloud, x, radii)
        assert list(batched) == [ball_mass(random_cloud, x, r) for r in radii]

    def test_radial_profile_agrees(self, random_cloud):
        x = np.array([0.3, 0.3])
        radii = np.linspace(0.01, 1.0, 25)
        profile = random_cloud.radial_profile(x)
        np.testing.assert_allclose(profile.masses(radii), ball_masses(random_cloud, x, radii), rtol=1e-12)

    def test_additivity(self, random_cloud):
        left = restrict(random_cloud, Box((-1, -1), (0, 1)))
        right = restrict(random_cloud, Box((np.nextafter(0, 1), -1), (1, 1)))
        x = (0.05, 0.0)
        total = ball_mass(random_cloud, x, 0.5)
        assert ball_mass(left, x, 0.5) + ball_mass(right, x, 0.5) == pytest.approx(total, rel=1e-12)

    @hyp_settings(max_examples=50, deadline=None)
    @given(
        x=st.tuples(st.floats(-1, 1), st.floats(-1, 1)),
        r1=st.floats(0, 2),
        r2=st.floats(0, 2),
    )
    def test_monotone_in_radius(self, x, r1, r2):
        rng = np.random.default_rng(3)
        measure = build_measure(rng.uniform(-1, 1, size=(200, 2)), rng.uniform(0, 1, 200), 1, 2, 0.01)
        lo, hi = sorted((r1, r2))
        assert ball_mass(measure, x, lo) <= ball_mass(measure, x, hi)

    @hyp_settings(max_examples=30, deadline=None)
    @given(exponent=st.integers(-8, 8), r=st.floats(0.01, 2))
    def test_power_of_two_scaling_is_exact(self, exponent, r):
        rng = np.random.default_rng(5)
        measure = build_measure(rng.uniform(-1, 1, size=(200, 2)), rng.uniform(0, 1, 200), 1, 2, 0.01)
        c = 2.0 ** exponent
        assert ball_mass(measure.scaled(c), (0, 0), r) == c * ball_mass(measure, (0, 0), r)

    def test_scaling_by_arbitrary_factor(self, random_cloud):
        c = 3.7
        scaled = random_cloud.scaled(c)
        assert ball_mass(scaled, (0, 0), 0.6) == pytest.approx(c * ball_mass(random_cloud, (0, 0), 0.6), rel=1e-13)


class TestRestrict:
    """Restriction to boxes and balls"""

    def test_box_containing_everything(self, segment):
        restricted = restrict(segment, Box((-1, -1), (2, 1)))
        assert restricted.total_mass == segment.total_mass
        assert restricted.h == segment.h

    def test_empty_region(self, segment):
        restricted = restrict(segment, Box((5, 5), (6, 6)))
        assert restricted.total_mass == 0.0
        assert len(restricted) == 0

    def test_half_segment(self, segment):
        restricted = restrict(segment, Box((0, -1), (0.5, 1)))
        assert abs(restricted.total_mass - 0.5) <= segment.h

    def test_ball_region(self, segment):
        restricted = restrict(segment, Ball((0.5, 0.0), 0.25))
        assert abs(restricted.total_mass - 0.5) <= 2 * segment.h

    def test_dimension_mismatch(self, segment):
        with pytest.raises(DimensionError):
            restrict(segment, Box((0, 0, 0), (1, 1, 1)))


class TestSignedMeasure:
    """Signed measures and total variation"""

    def test_total_variation_with_zero_part(self, unit_atom):
        nu = SignedMeasure(unit_atom, zero_measure(1, 2))
        assert total_variation(nu) == 1.0

    def test_no_cancellation(self, unit_atom):
        other = build_measure([(1.0, 1.0)], [1.0], 1, 2, 1.0)
        assert total_variation(SignedMeasure(unit_atom, other)) == 2.0

    def test_density_split(self):
        measure = build_measure([(0, 0), (1, 0), (2, 0), (3, 0)], [1.0, 1.0, 0.5, 1.0], 1, 2, 1.0)
        f = [1.0, -1.5, 2.0, 0.0]
        nu = density_signed_measure(measure, f)
        assert total_variation(nu) == pytest.approx(3.5)

    def test_identical_parts_cancel_in_ball_mass(self, unit_atom):
        nu = SignedMeasure(unit_atom, unit_atom)
        for r in (0.0, 0.5, 3.0):
            assert signed_ball_mass(nu, (0, 0), r) == 0.0

    def test_positive_atom(self):
        nu = signed_measure([(0.2, 0.0)], [0.7], 1, 2, 1.0)
        assert signed_ball_mass(nu, (0, 0), 0.5) == 0.7

    def test_matches_brute_force(self):
        rng = np.random.default_rng(21)
        points = rng.uniform(-1, 1, size=(100, 2))
        weights = rng.normal(size=100)
        nu = signed_measure(points, weights, 1, 2, 0.01)
        for _ in range(50):
            x = rng.uniform(-1, 1, size=2)
            r = rng.uniform(0, 1)
            mask = np.linalg.norm(points - x, axis=1) <= r
            assert signed_ball_mass(nu, x, r) == pytest.approx(np.sum(weights[mask]), abs=1e-12)

    def test_negative_scaling_swaps_parts(self):
        nu = signed_measure([(0, 0), (1, 0)], [2.0, -1.0], 1, 2, 1.0)
        flipped = nu.scaled(-3.0)
        assert flipped.pos.total_mass == 3.0
        assert flipped.neg.total_mass == 6.0

    def test_parts_must_share_dimension(self, unit_atom):
        with pytest.raises(DimensionError):
            SignedMeasure(unit_atom, zero_measure(1, 3))


class TestDiameter:
    """Support diameter"""

    def test_small_set(self):
        assert support_diameter(np.array([[0, 0], [3, 4], [1, 1]], dtype=float)) == 5.0

    def test_large_collinear_set(self):
        xs = np.linspace(0, 4, 5000)
        assert support_diameter(np.column_stack([xs, np.zeros_like(xs)])) == pytest.approx(4.0)

    def test_large_circle(self):
        t = 2 * np.pi * np.arange(8000) / 8000
        assert support_diameter(np.column_stack([np.cos(t), np.sin(t)])) == pytest.approx(2.0, rel=1e-9)

    def test_large_planar_set_in_3d(self):
        rng = np.random.default_rng(2)
        points = np.column_stack([rng.uniform(0, 1, 4000), rng.uniform(0, 1, 4000), np.zeros(4000)])
        expected = max(np.linalg.norm(points[i] - points[j]) for i in range(0, 4000, 400) for j in range(4000))
        assert support_diameter(points) >= expected - 1e-12

    def test_empty_and_single(self):
        assert support_diameter(np.zeros((0, 2))) == 0.0
        assert support_diameter(np.zeros((1, 2))) == 0.0


class TestMeasureFiles:
    """CSV and sidecar round trips"""

    def test_write_then_read_preserves_values(self, tmp_path, random_cloud):
        measure = random_cloud.with_metadata(generator='custom', params={'seed': 7})
        csv_path, meta_path = write_measure(measure, tmp_path / 'measure.csv')
        assert meta_path.name == 'measure.json'
        loaded = read_measure(csv_path)
        np.testing.assert_array_equal(loaded.points, measure.points)
        np.testing.assert_array_equal(loaded.weights, measure.weights)
        assert (loaded.n, loaded.d, loaded.h) == (measure.n, measure.d, measure.h)
        assert loaded.metadata['params'] == {'seed': 7}

    def test_header(self, tmp_path, unit_atom):
        csv_path, _ = write_measure(unit_atom, tmp_path / 'm.csv')
        assert csv_path.read_text().splitlines()[0] == 'x0,x1,w'

    def test_rewrite_is_byte_identical(self, tmp_path, random_cloud):
        first, _ = write_measure(random_cloud, tmp_path / 'a.csv')
        second, _ = write_measure(read_measure(first), tmp_path / 'b.csv')
        assert first.read_bytes() == second.read_bytes()

    def test_rejects_long_row(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text('x0,x1,w\n0,0,1\n0,0,1,5\n')
        with pytest.raises(FormatError):
            read_measure(path, n=1, h=1.0)

    def test_rejects_short_row(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text('x0,x1,w\n0,0,1\n0,1\n')
        with pytest.raises(FormatError):
            read_measure(path, n=1, h=1.0)

    def test_rejects_header_of_wrong_dimension(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text('x0,x1,w\n0,0,1\n')
        with pytest.raises(FormatError):
            read_measure(path, n=1, d=3, h=1.0)

    def test_missing_resolution(self, tmp_path):
        path = tmp_path / 'nosidecar.csv'
        path.write_text('x0,x1,w\n0,0,1\n')
        with pytest.raises(FormatError):
            read_measure(path)

    def test_signed_measure_file(self, tmp_path):
        nu = signed_measure([(0, 0), (1, 0), (2, 0)], [1.5, -0.5, 2.0], 1, 2, 1.0)
        path = write_signed_measure(nu, tmp_path / 'nu.csv')
        loaded = read_signed_measure(path)
        assert total_variation(loaded) == 4.0
        assert signed_ball_mass(loaded, (1, 0), 0.1) == -0.5
        assert math.isclose(loaded.pos.total_mass, 3.5)
