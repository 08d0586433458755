"""
Tests for blowups, flatness and uniformity scores and blowup traces
"""

import numpy as np
import pytest
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from src.generators import cantor4_centers, gen_cantor4, gen_circle, gen_lipschitz_graph, gen_plane
from src.measures import build_measure
from src.tangent import blowup, blowup_trace, flatness_beta2, uniformity_score
from src.utils.errors import PreconditionError, ResolutionError, ValidationError


@pytest.fixture(scope='module')
def segment():
    return gen_plane(1, 2, 4.0, 1 / 1024)


@pytest.fixture(scope='module')
def circle():
    return gen_circle(1.0, 20000)


@pytest.fixture(scope='module')
def sinusoid():
    return gen_lipschitz_graph(1, 2, 1.0, 1 / 4096, profile='sinusoid', amplitude=0.1)


@pytest.fixture(scope='module')
def cantor6():
    return gen_cantor4(6)


@pytest.fixture
def two_lines():
    s = 1 / 512
    u = np.arange(2049) * s
    points = np.vstack([np.column_stack([u, np.zeros_like(u)]), np.column_stack([u, np.full_like(u, 0.5)])])
    return build_measure(points, np.full(len(points), s), 1, 2, s)


class TestBlowup:
    """T_{x,r}#mu normalized on the unit ball"""

    def test_plane_through_x(self, segment):
        nu = blowup(segment, segment.points[2048], 0.1)
        assert nu.unit_mass == pytest.approx(1.0, abs=1e-12)
        assert np.all(nu.measure.points[:, 1] == 0.0)
        assert nu.measure.h == segment.h / 0.1
        assert np.abs(nu.measure.points).max() <= nu.window * (1 + 1e-12)

    def test_images_are_plain_homotheties(self, circle):
        x = circle.points[17]
        nu = blowup(circle, x, 0.3)
        np.testing.assert_array_equal(nu.measure.points, (circle.points[nu.point_ids] - x) / 0.3)

    @pytest.mark.parametrize('r,s', [(0.2, 0.3), (0.1, 0.5), (0.05, 0.7)])
    def test_composition(self, sinusoid, r, s):
        x = sinusoid.points[1500]
        inner = blowup(sinusoid, x, r)
        outer = blowup(inner.measure, np.zeros(2), s)
        direct = blowup(sinusoid, x, r * s)
        composed = inner.point_ids[outer.point_ids]
        common = np.intersect1d(composed, direct.point_ids)
        assert len(common) >= len(direct.point_ids) - 2
        np.testing.assert_allclose(
            outer.measure.points[np.isin(composed, common)],
            direct.measure.points[np.isin(direct.point_ids, common)],
            rtol=0, atol=1e-12,
        )

    @pytest.mark.parametrize('j', [1, 2, 3])
    def test_cantor_self_similarity(self, cantor6, j):
        center = cantor4_centers(j)[1]
        nu = blowup(cantor6, center, 4.0 ** (-j))
        images = nu.measure.points
        inside = np.abs(images).max(axis=1) <= 0.5
        expected = cantor4_centers(6 - j) - 0.5
        assert inside.sum() == len(expected)
        distances, _ = cKDTree(expected).query(images[inside])
        assert distances.max() <= 1e-9
        np.testing.assert_allclose(nu.measure.weights[inside], 4.0 ** (j - 6), rtol=1e-12)

    def test_zero_mass_ball(self, segment):
        with pytest.raises(PreconditionError):
            blowup(segment, (10.0, 10.0), 1.0)

    def test_invalid_radius(self, segment):
        with pytest.raises(ValidationError):
            blowup(segment, segment.points[0], 0.0)


class TestFlatness:
    """beta2 distance to the best-fit plane"""

    def test_plane_is_flat(self, segment):
        score = flatness_beta2(blowup(segment, segment.points[2048], 0.1))
        assert score.beta2 <= 1e-12
        np.testing.assert_allclose(np.abs(score.basis[:, 0]), [1.0, 0.0], atol=1e-12)

    def test_circle_beta2_tracks_radius(self, circle):
        ratios = []
        for r in (0.02, 0.05, 0.1, 0.2):
            ratios.append(flatness_beta2(blowup(circle, circle.points[0], r)).beta2 / r)
        assert max(ratios) <= 2 * min(ratios)
        # arc of curvature 1: beta2 ~ r / sqrt(45)
        assert all(0.1 <= ratio <= 0.2 for ratio in ratios)

    @pytest.mark.parametrize('j', [1, 2, 3, 4])
    def test_cantor_never_flattens(self, cantor6, j):
        center = cantor4_centers(j)[0]
        assert flatness_beta2(blowup(cantor6, center, 4.0 ** (-j))).beta2 >= 0.05

    def test_rigid_motion(self):
        rng = np.random.default_rng(8)
        cloud = rng.normal(size=(300, 3)) * [0.5, 0.3, 0.05]
        rotation = Rotation.random(random_state=5).as_matrix()
        shift = np.array([2.0, -1.0, 0.5])
        weights = np.full(len(cloud), 1 / 300)
        original = build_measure(cloud, weights, 2, 3, 1e-3)
        moved = build_measure(cloud @ rotation.T + shift, weights, 2, 3, 1e-3)
        first = flatness_beta2(blowup(original, np.zeros(3), 1.2))
        second = flatness_beta2(blowup(moved, shift, 1.2))
        assert second.beta2 == pytest.approx(first.beta2, rel=1e-10)
        np.testing.assert_allclose(second.projector, rotation @ first.projector @ rotation.T, atol=1e-8)

    def test_too_few_points(self):
        measure = build_measure([(0.0, 0.0, 0.0)], [1.0], 2, 3, 0.01)
        with pytest.raises(PreconditionError):
            flatness_beta2(blowup(measure, (0.0, 0.0, 0.0), 1.0))


class TestUniformity:
    """nu(B(y, rho)) / rho^n against its median"""

    def test_plane_is_uniform(self, segment):
        score = uniformity_score(blowup(segment, segment.points[2048], 0.1))
        assert score.max_rel_dev <= 0.15
        assert score.c_fit > 0

    def test_two_parallel_lines(self, two_lines):
        x = two_lines.points[1024]
        score = uniformity_score(blowup(two_lines, x, 1.0), probe_count=64)
        assert score.max_rel_dev >= 0.5

    def test_unresolved_probe_balls(self):
        measure = gen_plane(1, 2, 1.0, 0.01)
        with pytest.raises(ResolutionError):
            uniformity_score(blowup(measure, measure.points[50], 0.05))

    def test_probe_choice_is_seeded(self, circle):
        nu = blowup(circle, circle.points[0], 0.2)
        first = uniformity_score(nu, probe_count=8, seed=3)
        second = uniformity_score(nu, probe_count=8, seed=3)
        assert first.c_fit == second.c_fit
        assert first.max_rel_dev == second.max_rel_dev
        assert first.probes == 8


class TestBlowupTrace:
    """Scores along decreasing radii"""

    def test_plane_stays_at_floor(self, segment):
        trace = blowup_trace(segment, segment.points[2048], [0.2, 0.1, 0.05])
        assert np.all(trace.beta2 <= 1e-12)
        assert abs(trace.slope) <= 1e-9

    def test_graph_flattens(self, sinusoid):
        # u = 0.25 is a crest of the sinusoid
        trace = blowup_trace(sinusoid, sinusoid.points[1024], [0.1, 0.05, 0.025, 0.0125])
        assert trace.slope >= 0.7

    def test_cantor_stays_rough(self):
        measure = gen_cantor4(7)
        radii = 4.0 ** -np.arange(1, 6)
        trace = blowup_trace(measure, cantor4_centers(7)[0], radii)
        assert trace.min_beta2 >= 0.05
        assert abs(trace.slope) <= 0.1

    def test_rows_follow_csv_layout(self, circle):
        trace = blowup_trace(circle, circle.points[0], [0.2, 0.1], point_id=0)
        rows = trace.rows()
        assert len(rows) == 2
        assert list(rows[0]) == ['point_id', 'r', 'beta2', 'c_fit', 'max_rel_dev']
        assert trace.to_dict()['scope'] == 'along tested scales'

    @pytest.mark.parametrize('radii', [[0.1, 0.2], [], [0.1, -0.05]])
    def test_invalid_radii(self, circle, radii):
        with pytest.raises(ValidationError):
            blowup_trace(circle, circle.points[0], radii)
