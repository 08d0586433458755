"""
Density Package - Multiscale density differences, square functions and smoothing
"""

from .grid import ScaleGrid, make_scale_grid
from .multiscale import (
    DensityExtremes,
    DensityProfile,
    SquareFunctionResult,
    density_ratio,
    delta,
    density_extremes,
    density_profile,
    square_function,
    square_function_from_deltas,
    carleson_energy,
)
from .smoothing import (
    WindowBound,
    OctaveSmoothedEnergy,
    gamma_half_integer,
    kernel_psi,
    kernel_grid,
    smoothed_delta,
    smoothed_via_kernel,
    tail_factor,
    window_sup_bound,
    octave_smoothed_energy,
    domination_floor,
    domination_constant,
)
from .operator import WeakTypeResult, operator_T, operator_T_mu, weak_11_statistic

__all__ = [
    'ScaleGrid',
    'make_scale_grid',
    'DensityExtremes',
    'DensityProfile',
    'SquareFunctionResult',
    'density_ratio',
    'delta',
    'density_extremes',
    'density_profile',
    'square_function',
    'square_function_from_deltas',
    'carleson_energy',
    'WindowBound',
    'OctaveSmoothedEnergy',
    'gamma_half_integer',
    'kernel_psi',
    'kernel_grid',
    'smoothed_delta',
    'smoothed_via_kernel',
    'tail_factor',
    'window_sup_bound',
    'octave_smoothed_energy',
    'domination_floor',
    'domination_constant',
    'WeakTypeResult',
    'operator_T',
    'operator_T_mu',
    'weak_11_statistic'
]
