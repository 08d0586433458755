"""
Measures Package - Discrete and signed measures with exact ball-mass queries
"""

from .core import (
    DiscreteMeasure,
    SignedMeasure,
    Box,
    Ball,
    build_measure,
    ball_mass,
    ball_masses,
    restrict,
    zero_measure,
    signed_measure,
    density_signed_measure,
    total_variation,
    signed_ball_mass,
    signed_ball_masses,
)
from .index import BallQueryIndex, RadialProfile, brute_force_ball_mass
from .geometry import support_diameter, bounding_box
from .io import read_measure, write_measure, read_signed_measure, write_signed_measure, write_json

__all__ = [
    'DiscreteMeasure',
    'SignedMeasure',
    'Box',
    'Ball',
    'build_measure',
    'ball_mass',
    'ball_masses',
    'restrict',
    'zero_measure',
    'signed_measure',
    'density_signed_measure',
    'total_variation',
    'signed_ball_mass',
    'signed_ball_masses',
    'BallQueryIndex',
    'RadialProfile',
    'brute_force_ball_mass',
    'support_diameter',
    'bounding_box',
    'read_measure',
    'write_measure',
    'read_signed_measure',
    'write_signed_measure',
    'write_json'
]
