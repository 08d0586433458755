"""
CZ Package - Calderon-Zygmund decompositions of signed measures and their audit
"""

from .decomposition import (
    AUDIT_ETAS,
    CZCube,
    CZDecomposition,
    cz_decompose,
    hypothesis_bound,
    net_weights,
)
from .audit import AuditReport, ClauseResult, cz_audit

__all__ = [
    'AUDIT_ETAS',
    'CZCube',
    'CZDecomposition',
    'cz_decompose',
    'hypothesis_bound',
    'net_weights',
    'AuditReport',
    'ClauseResult',
    'cz_audit'
]
