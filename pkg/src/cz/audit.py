"""
Audit of a Calderon-Zygmund decomposition

Every clause is recomputed from nu, mu and the stored cubes and constants, so
a decomposition edited after construction is judged on what it holds now.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config.settings import get_settings
from src.measures.core import DiscreteMeasure, SignedMeasure, total_variation
from .decomposition import AUDIT_ETAS, CZDecomposition, net_weights

logger = logging.getLogger(__name__)

RELATIVE_TOLERANCE = 1e-12


@dataclass
class ClauseResult:
    """One audit clause: pass flag, measured constant and the worst witness."""
    id: str
    passed: bool
    constant: Optional[float]
    limit: Optional[float] = None
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'id': self.id,
            'passed': self.passed,
            'constant': self.constant,
            'limit': self.limit,
            'witness': self.witness,
        }


@dataclass
class AuditReport:
    lam: float
    clauses: List[ClauseResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(clause.passed for clause in self.clauses)

    @property
    def failed_clauses(self) -> List[str]:
        return [clause.id for clause in self.clauses if not clause.passed]

    def clause(self, clause_id: str) -> ClauseResult:
        for clause in self.clauses:
            if clause.id == clause_id:
                return clause
        raise KeyError(clause_id)

    def to_dict(self) -> dict:
        return {
            'lambda': self.lam,
            'passed': self.passed,
            'clauses': [clause.to_dict() for clause in self.clauses],
        }


def _mass(values: np.ndarray, ids: np.ndarray) -> float:
    return math.fsum(values[ids]) if len(ids) else 0.0


def _close(a: float, b: float, scale: float) -> bool:
    return abs(a - b) <= RELATIVE_TOLERANCE * max(scale, np.finfo(float).tiny)


def cz_audit(dec: CZDecomposition, nu: SignedMeasure, measure: DiscreteMeasure,
             etas: Sequence[float] = AUDIT_ETAS, constant_limit: Optional[float] = None) -> AuditReport:
    """
    Check the decomposition clause by clause. Never raises on a failed clause.

    Clauses:
        cube_density_exceeds: |nu|(Q_j) > 2^(-d-1) lam mu(2Q_j)
        dilated_density_bounded: |nu|(eta Q_j) <= 2^(-d-1) lam mu(2 eta Q_j) for each eta
        good_part_outside: |f| <= lam off the union of the Q_j
        bad_mean_matches: integral of b_j dmu = integral of w_j dnu
        bad_sup_controlled: ||b_j||_inf mu(R_j) <= c |nu|(Q_j)
        bad_sum_bounded: sum_j |b_j| <= c lam pointwise
        bounded_overlap: sum_j chi_Qj <= c
        zero_mean: beta_j(R_j) = 0
        double_union_mass: lam mu(union of 2Q_j) <= c ||nu||
        dilated_meets_support: 4Q_j meets supp(mu)
        good_part_bounded: ||g||_inf <= c lam
        decomposition_identity: nu = g mu + sum_j (w_j nu - b_j mu) at every support point
    """
    limit = get_settings().audit_constant_limit if constant_limit is None else float(constant_limit)
    lam = dec.lam
    d = measure.d
    threshold = 2.0 ** (-d - 1) * lam
    mu_weights = measure.weights
    nu_weights = net_weights(nu, measure)
    abs_nu = np.abs(nu_weights)
    density = np.divide(nu_weights, mu_weights, out=np.zeros_like(nu_weights), where=mu_weights > 0)
    index = measure.index
    norm = total_variation(nu)
    size = len(measure)
    report = AuditReport(lam)

    # cube_density_exceeds
    worst, witness = math.inf, {}
    for cube in dec.cubes:
        double = _mass(mu_weights, index.cube_members(cube.center, cube.side))
        ratio = _mass(abs_nu, cube.members) / (threshold * double) if double > 0 else math.inf
        if ratio < worst:
            worst, witness = ratio, {'cube': cube.index, 'point_id': cube.point_id}
    if dec.cubes:
        report.clauses.append(ClauseResult('cube_density_exceeds', worst > 1.0, worst, 1.0, witness))
    else:
        report.clauses.append(ClauseResult('cube_density_exceeds', True, None, 1.0, {}))

    # dilated_density_bounded
    worst, witness = 0.0, {}
    for cube in dec.cubes:
        for eta in etas:
            nu_mass = _mass(abs_nu, index.cube_members(cube.center, eta * cube.side / 2))
            mu_mass = _mass(mu_weights, index.cube_members(cube.center, eta * cube.side))
            ratio = nu_mass / (threshold * mu_mass)
            if ratio > worst:
                worst, witness = ratio, {'cube': cube.index, 'eta': eta}
    report.clauses.append(ClauseResult(
        'dilated_density_bounded', worst <= 1.0 + RELATIVE_TOLERANCE, worst, 1.0, witness))

    # good_part_outside
    outside = np.nonzero(dec.overlap == 0)[0]
    outside_sup = float(np.max(np.abs(density[outside]))) / lam if len(outside) else 0.0
    witness = {'point_id': int(outside[np.argmax(np.abs(density[outside]))])} if len(outside) else {}
    report.clauses.append(ClauseResult(
        'good_part_outside', outside_sup <= 1.0 + RELATIVE_TOLERANCE, outside_sup, 1.0, witness))

    # bad_mean_matches and zero_mean
    worst_gap, witness = 0.0, {}
    mean_gap, mean_witness = 0.0, {}
    for cube in dec.cubes:
        nu_integral = dec.bad_integral(cube.index)
        b_integral = math.fsum(dec.bad_values(cube.index, size)[cube.bad_support] * mu_weights[cube.bad_support])
        scale = _mass(abs_nu, cube.members)
        gap = abs(b_integral - nu_integral) / max(scale, np.finfo(float).tiny)
        if gap > worst_gap:
            worst_gap, witness = gap, {'cube': cube.index}
        # beta_j(R_j): w_j nu lives on Q_j, inside R_j
        inside = np.isin(cube.members, index.cube_members(cube.center, 3 * cube.side))
        beta = math.fsum(dec.weights[cube.index][inside] * nu_weights[cube.members][inside]) - b_integral
        if abs(beta) / max(scale, np.finfo(float).tiny) > mean_gap:
            mean_gap, mean_witness = abs(beta) / max(scale, np.finfo(float).tiny), {'cube': cube.index}
    report.clauses.append(ClauseResult(
        'bad_mean_matches', worst_gap <= RELATIVE_TOLERANCE, worst_gap, RELATIVE_TOLERANCE, witness))

    # bad_sup_controlled
    worst, witness = 0.0, {}
    for cube in dec.cubes:
        bad_mass = _mass(mu_weights, cube.bad_support)
        nu_mass = _mass(abs_nu, cube.members)
        ratio = abs(dec.b_constants[cube.index]) * bad_mass / nu_mass if nu_mass > 0 else math.inf
        if ratio > worst:
            worst, witness = ratio, {'cube': cube.index}
    report.clauses.append(ClauseResult('bad_sup_controlled', worst <= limit, worst, limit, witness))

    # bad_sum_bounded
    bad_sum = np.zeros(size)
    for cube in dec.cubes:
        bad_sum += np.abs(dec.bad_values(cube.index, size))
    constant = float(bad_sum.max()) / lam if size else 0.0
    witness = {'point_id': int(np.argmax(bad_sum))} if dec.cubes else {}
    report.clauses.append(ClauseResult('bad_sum_bounded', constant <= limit, constant, limit, witness))

    # bounded_overlap
    counts = np.zeros(size, dtype=np.int64)
    for cube in dec.cubes:
        counts[index.cube_members(cube.center, cube.side / 2)] += 1
    constant = float(counts.max()) if size else 0.0
    witness = {'point_id': int(np.argmax(counts))} if dec.cubes else {}
    report.clauses.append(ClauseResult('bounded_overlap', constant <= limit, constant, limit, witness))

    report.clauses.append(ClauseResult(
        'zero_mean', mean_gap <= RELATIVE_TOLERANCE, mean_gap, RELATIVE_TOLERANCE, mean_witness))

    # double_union_mass
    doubled = np.zeros(size, dtype=bool)
    for cube in dec.cubes:
        doubled[index.cube_members(cube.center, cube.side)] = True
    constant = lam * _mass(mu_weights, np.nonzero(doubled)[0]) / norm if norm > 0 else 0.0
    report.clauses.append(ClauseResult('double_union_mass', constant <= limit, constant, limit, {}))

    # dilated_meets_support
    missing = [cube.index for cube in dec.cubes if len(index.cube_members(cube.center, 2 * cube.side)) == 0]
    report.clauses.append(ClauseResult(
        'dilated_meets_support', not missing, float(len(missing)), 0.0, {'cubes': missing[:10]}))

    # good_part_bounded
    good_sup = float(np.max(np.abs(dec.good))) / lam if len(dec.good) else 0.0
    witness = {'point_id': int(np.argmax(np.abs(dec.good)))} if len(dec.good) else {}
    report.clauses.append(ClauseResult('good_part_bounded', good_sup <= limit, good_sup, limit, witness))

    # decomposition_identity
    worst, witness = 0.0, {}
    rebuilt = [list() for _ in range(size)]
    for i in range(size):
        rebuilt[i].append(dec.good[i] * mu_weights[i])
    for cube in dec.cubes:
        for member, w in zip(cube.members, dec.weights[cube.index]):
            rebuilt[member].append(w * nu_weights[member])
        for member in cube.bad_support:
            rebuilt[member].append(-dec.b_constants[cube.index] * mu_weights[member])
    for i in range(size):
        total = math.fsum(rebuilt[i])
        scale = max(abs(nu_weights[i]), max((abs(v) for v in rebuilt[i]), default=0.0))
        if not _close(total, nu_weights[i], scale):
            gap = abs(total - nu_weights[i]) / max(scale, np.finfo(float).tiny)
            if gap > worst:
                worst, witness = gap, {'point_id': i}
    report.clauses.append(ClauseResult(
        'decomposition_identity', worst == 0.0, worst, RELATIVE_TOLERANCE, witness))

    if report.passed:
        logger.debug(f"CZ audit passed at lambda = {lam:g} with {len(dec.cubes)} cubes")
    else:
        logger.warning(f"CZ audit at lambda = {lam:g} failed: {', '.join(report.failed_clauses)}")
    return report
