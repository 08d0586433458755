"""
Tests for the Calderon-Zygmund decomposition and its audit
"""

import json

import numpy as np
import pytest

from src.cz import cz_audit, cz_decompose, hypothesis_bound, net_weights
from src.generators import gen_plane
from src.measures import density_signed_measure, signed_measure
from src.utils.errors import AuditFailureError, PreconditionError, ValidationError


@pytest.fixture(scope='module')
def segment():
    return gen_plane(1, 2, 1.0, 1 / 256)


@pytest.fixture
def heavy_atom(segment):
    return signed_measure([segment.points[128]], [1.0], 1, 2, segment.h)


def random_instance(segment, rng):
    ids = rng.choice(len(segment), size=100, replace=False)
    weights = rng.choice([-1.0, 1.0], size=100) * rng.lognormal(0.0, 1.5, size=100)
    nu = signed_measure(segment.points[ids], weights, 1, 2, segment.h)
    lam = hypothesis_bound(nu, segment) * rng.uniform(1.01, 3.0)
    return nu, lam


class TestPreconditions:
    """Inputs the decomposition refuses"""

    def test_lambda_below_bound(self, segment, heavy_atom):
        with pytest.raises(PreconditionError):
            cz_decompose(heavy_atom, segment, 0.5 * hypothesis_bound(heavy_atom, segment))

    def test_atom_off_support(self, segment):
        nu = signed_measure([(0.5, 0.3)], [1.0], 1, 2, segment.h)
        with pytest.raises(ValidationError):
            cz_decompose(nu, segment, 100.0)

    def test_nonpositive_lambda(self, segment, heavy_atom):
        with pytest.raises(ValidationError):
            cz_decompose(heavy_atom, segment, 0.0)

    def test_net_weights_merge_atoms(self, segment):
        point = segment.points[10]
        nu = signed_measure([point, point, segment.points[20]], [2.0, -0.5, 1.0], 1, 2, segment.h)
        weights = net_weights(nu, segment)
        assert weights[10] == 1.5
        assert weights[20] == 1.0
        assert np.count_nonzero(weights) == 2


class TestDecomposition:
    """Cubes, good part and bad parts"""

    def test_bounded_density_gives_no_cubes(self, segment):
        rng = np.random.default_rng(0)
        f = rng.uniform(-1, 1, len(segment))
        nu = density_signed_measure(segment, f)
        lam = max(2.0, 1.01 * hypothesis_bound(nu, segment))
        dec = cz_decompose(nu, segment, lam)
        assert dec.is_empty
        np.testing.assert_allclose(dec.good, f, rtol=1e-14, atol=1e-15)
        assert dec.audit.passed
        assert dec.audit.clause('cube_density_exceeds').constant is None

    def test_single_heavy_atom(self, segment, heavy_atom):
        dec = cz_decompose(heavy_atom, segment, 20.0)
        assert len(dec.cubes) == 1
        cube = dec.cubes[0]
        assert cube.point_id == 128
        assert dec.bad_integral(0) == 1.0
        b_integral = float(np.sum(dec.bad_values(0, len(segment)) * segment.weights))
        assert b_integral == pytest.approx(1.0, rel=1e-12)
        assert dec.audit.clause('cube_density_exceeds').constant > 1.0
        assert dec.audit.passed

    def test_every_large_point_is_covered(self, segment):
        rng = np.random.default_rng(1)
        nu, lam = random_instance(segment, rng)
        dec = cz_decompose(nu, segment, lam)
        large = np.abs(dec.density) > lam
        assert np.all(dec.covered[large])

    def test_random_instances_pass_audit(self, segment):
        rng = np.random.default_rng(42)
        total_cubes = 0
        for _ in range(100):
            nu, lam = random_instance(segment, rng)
            dec = cz_decompose(nu, segment, lam, strict=False)
            assert dec.audit.passed, dec.audit.failed_clauses
            assert dec.audit.clause('good_part_bounded').constant <= 100
            assert dec.audit.clause('decomposition_identity').passed
            total_cubes += len(dec.cubes)
        assert total_cubes > 0

    def test_homogeneity(self, segment):
        rng = np.random.default_rng(3)
        nu, lam = random_instance(segment, rng)
        base = cz_decompose(nu, segment, lam)
        scaled = cz_decompose(nu.scaled(4.0), segment, 4 * lam)
        assert [c.point_id for c in scaled.cubes] == [c.point_id for c in base.cubes]
        assert [c.side for c in scaled.cubes] == [c.side for c in base.cubes]
        assert scaled.audit.passed

    def test_dump_is_json(self, segment, heavy_atom):
        dec = cz_decompose(heavy_atom, segment, 20.0)
        dump = json.loads(json.dumps({'decomposition': dec.to_dict(), 'audit': dec.audit.to_dict()}))
        assert dump['decomposition']['cube_count'] == 1
        assert {c['id'] for c in dump['audit']['clauses']} >= {
            'cube_density_exceeds', 'dilated_density_bounded', 'good_part_outside', 'bad_mean_matches',
            'bad_sup_controlled', 'bad_sum_bounded', 'bounded_overlap', 'zero_mean',
            'decomposition_identity',
        }


class TestAudit:
    """Corrupted decompositions are caught"""

    def test_corrupted_bad_part(self, segment, heavy_atom):
        dec = cz_decompose(heavy_atom, segment, 20.0)
        dec.b_constants[0] *= 2
        report = cz_audit(dec, heavy_atom, segment)
        assert not report.passed
        assert 'bad_mean_matches' in report.failed_clauses

    def test_strict_failure_carries_report(self, segment, heavy_atom):
        with pytest.raises(AuditFailureError) as excinfo:
            cz_decompose(heavy_atom, segment, 20.0, constant_limit=1e-6)
        assert excinfo.value.decomposition is not None
        assert 'bad_sum_bounded' in excinfo.value.report.failed_clauses

    def test_lenient_failure_is_reported(self, segment, heavy_atom):
        dec = cz_decompose(heavy_atom, segment, 20.0, strict=False, constant_limit=1e-6)
        assert not dec.audit.passed
