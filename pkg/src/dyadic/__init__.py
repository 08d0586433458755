"""
Dyadic Package - Cube lattices over point clouds and martingale decompositions
"""

from .lattice import DyadicCube, DyadicLattice, base_scale_for, build_lattice, neighbors
from .martingale import (
    EnergyIdentity,
    MartingaleLayer,
    cube_mean,
    energy_identity,
    inner_product,
    martingale_delta,
    martingale_layer,
)

__all__ = [
    'DyadicCube',
    'DyadicLattice',
    'base_scale_for',
    'build_lattice',
    'neighbors',
    'EnergyIdentity',
    'MartingaleLayer',
    'cube_mean',
    'energy_identity',
    'inner_product',
    'martingale_delta',
    'martingale_layer'
]
