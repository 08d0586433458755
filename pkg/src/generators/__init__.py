"""
Generators Package - Synthetic measures with analytically known structure
"""

from .specs import GeneratorKind, GeneratorSpec
from .synthetic import (
    gen_plane,
    gen_lipschitz_graph,
    gen_circle,
    gen_cantor4,
    gen_mixture,
    cantor4_centers,
    profile_function,
    point_labels,
    generate,
)
from .audit import ADAuditResult, ad_regularity_audit

__all__ = [
    'GeneratorKind',
    'GeneratorSpec',
    'gen_plane',
    'gen_lipschitz_graph',
    'gen_circle',
    'gen_cantor4',
    'gen_mixture',
    'cantor4_centers',
    'profile_function',
    'point_labels',
    'generate',
    'ADAuditResult',
    'ad_regularity_audit'
]
