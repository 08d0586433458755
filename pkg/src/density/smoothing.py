"""
Gaussian-smoothed density differences and the kernel that links them to Delta

Delta_phi(x, r) = phi_r * mu(x) - phi_2r * mu(x) with phi(y) = exp(-|y|^2),
phi_r(y) = r^-n phi(y / r), and

    Delta_phi(x, r) = integral_0^inf Delta(x, s) psi_r(s) ds,
    psi_r(s) = 2 s^(n+1) / r^(n+2) * exp(-s^2 / r^2).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate, special

from src.measures.core import DiscreteMeasure
from src.utils.errors import ResolutionError, ValidationError
from src.utils.validators import as_query_point, validate_radius
from .grid import ScaleGrid

logger = logging.getLogger(__name__)

# exp(-t) underflows to exactly 0.0 for t above this
EXP_UNDERFLOW = 745.2

DEFAULT_NODES_PER_OCTAVE = 256
MIN_NODES_PER_OCTAVE = 8
KERNEL_SPAN = 100.0


def gamma_half_integer(n: int) -> float:
    """Gamma(n/2 + 1) by exact recursion from Gamma(1) = 1 or Gamma(1/2) = sqrt(pi)."""
    if int(n) != n or n < 0:
        raise ValidationError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    if n % 2 == 0:
        return float(math.factorial(n // 2))
    value = math.sqrt(math.pi)
    z = 0.5
    while z < n / 2 + 1:
        value *= z
        z += 1.0
    return value


def kernel_psi(s, r: float, n: int):
    """psi_r(s) = 2 s^(n+1) / r^(n+2) * exp(-s^2/r^2); s may be an array."""
    r = validate_radius(r, allow_zero=False)
    values = np.asarray(s, dtype=np.float64)
    if np.any(~(values > 0)):
        raise ValidationError("kernel_psi needs s > 0")
    result = 2.0 * values ** (n + 1) / r ** (n + 2) * np.exp(-(values / r) ** 2)
    return float(result) if result.ndim == 0 else result


def _gaussian_average(measure: DiscreteMeasure, x: np.ndarray, r: float) -> float:
    """phi_r * mu(x) over the points whose Gaussian term does not underflow."""
    cutoff = r * math.sqrt(EXP_UNDERFLOW)
    idx = measure.index.candidates(x, cutoff)
    if len(idx) == 0:
        return 0.0
    sq = np.sum((measure.points[idx] - x) ** 2, axis=1)
    return float(np.sum(measure.weights[idx] * np.exp(-sq / (r * r)))) / r ** measure.n


def smoothed_delta(measure: DiscreteMeasure, x, r: float) -> float:
    """
    Delta_phi(x, r) = sum_i w_i [r^-n e^(-|x-x_i|^2/r^2) - (2r)^-n e^(-|x-x_i|^2/(2r)^2)].

    Terms past the exp underflow radius are exactly 0.0 and skipped.
    """
    r = validate_radius(r, allow_zero=False)
    point = as_query_point(x, measure.d)
    return _gaussian_average(measure, point, r) - _gaussian_average(measure, point, 2 * r)


def smoothed_delta_batch(measure: DiscreteMeasure, x: np.ndarray, radii: np.ndarray) -> np.ndarray:
    return np.array([smoothed_delta(measure, x, float(r)) for r in radii])


def kernel_grid(r: float, nodes_per_octave: int = DEFAULT_NODES_PER_OCTAVE,
                span: float = KERNEL_SPAN) -> np.ndarray:
    """Log-uniform s nodes covering [r/span, r*span]."""
    half = int(math.ceil(math.log2(span) * nodes_per_octave))
    return r * 2.0 ** (np.arange(-half, half + 1) / nodes_per_octave)


def _delta_from_profile(measure: DiscreteMeasure, x: np.ndarray, s: np.ndarray) -> np.ndarray:
    profile = measure.radial_profile(x)
    masses = profile.masses(np.concatenate([s, 2 * s]))
    k = len(s)
    return masses[:k] / s ** measure.n - masses[k:] / (2 * s) ** measure.n


def smoothed_via_kernel(measure: DiscreteMeasure, x, r: float, s_grid: Optional[np.ndarray] = None,
                        nodes_per_octave: int = DEFAULT_NODES_PER_OCTAVE) -> float:
    """
    Quadrature of integral Delta(x, s) psi_r(s) ds, trapezoid in log s.

    Raises:
        ValidationError: s_grid has fewer than 8 nodes per octave
    """
    r = validate_radius(r, allow_zero=False)
    point = as_query_point(x, measure.d)
    s = kernel_grid(r, nodes_per_octave) if s_grid is None else np.sort(np.asarray(s_grid, dtype=np.float64))
    if len(s) < 2 or np.any(s <= 0):
        raise ValidationError("s_grid needs at least two positive nodes")
    density = (len(s) - 1) / math.log2(s[-1] / s[0])
    if density < MIN_NODES_PER_OCTAVE:
        raise ValidationError(f"s_grid has {density:.3g} nodes per octave, need at least {MIN_NODES_PER_OCTAVE}")
    if measure.is_empty:
        return 0.0
    integrand = _delta_from_profile(measure, point, s) * kernel_psi(s, r, measure.n) * s
    return float(integrate.trapezoid(integrand, np.log(s)))


def tail_factor(r: float, n: int) -> float:
    """
    integral_{r^-1/2}^inf 2 t^(n+1) e^(-t^2) dt = Gamma(n/2 + 1, 1/r)
    (upper incomplete gamma).
    """
    a = n / 2 + 1
    return float(special.gammaincc(a, 1.0 / r) * gamma_half_integer(n))


def _abs_delta_sup(profile, n: int, lo: float, hi: float) -> float:
    """
    sup of |Delta(x, s)| for s in [lo, hi].

    Delta is c1/s^n - c2/(2s)^n between breakpoints d_i and d_i/2, hence
    monotone there; the sup is reached at interval ends or breakpoint
    values and left limits.
    """
    d = profile.distances
    breaks = np.concatenate([d, d / 2])
    breaks = breaks[(breaks > lo) & (breaks <= hi)]
    nodes = np.unique(np.concatenate([[lo, hi], breaks]))
    cumulative = profile.cumulative

    def values(s, side):
        inner = cumulative[np.searchsorted(d, s, side=side)]
        outer = cumulative[np.searchsorted(d, 2 * s, side=side)]
        return inner / s ** n - outer / (2 * s) ** n

    closed = np.abs(values(nodes, 'right'))
    left = np.abs(values(nodes[1:], 'left'))
    return float(max(closed.max(), left.max() if len(left) else 0.0))


@dataclass
class WindowBound:
    """Pieces of |Delta_phi(x, r)| <= Gamma(n/2+1) * sup_window + sup_all * tail_factor."""
    sup_window: float
    tail_factor: float
    sup_all: float
    gamma: float

    @property
    def bound(self) -> float:
        return self.gamma * self.sup_window + self.sup_all * self.tail_factor

    def as_tuple(self):
        return self.sup_window, self.tail_factor


def window_sup_bound(measure: DiscreteMeasure, x, r: float, r_min: Union[float, ScaleGrid]) -> WindowBound:
    """
    sup of |Delta(x, s)| over r_min <= s <= sqrt(r), the same sup over all s >= r_min,
    and the Gaussian tail factor beyond sqrt(r).

    Raises:
        ValidationError: r outside (0, 1)
        ResolutionError: sqrt(r) < r_min
    """
    r = validate_radius(r, allow_zero=False)
    if r >= 1:
        raise ValidationError(f"window_sup_bound needs 0 < r < 1, got {r}")
    floor = r_min.r_min if isinstance(r_min, ScaleGrid) else float(r_min)
    window = math.sqrt(r)
    if window < floor:
        raise ResolutionError(f"Window sqrt(r) = {window:g} lies below r_min = {floor:g}", r_min=floor)
    point = as_query_point(x, measure.d)
    n = measure.n
    if measure.is_empty:
        return WindowBound(0.0, tail_factor(r, n), 0.0, gamma_half_integer(n))
    profile = measure.radial_profile(point)
    # beyond the farthest point Delta = M(1 - 2^-n)/s^n decreases
    reach = max(float(profile.distances[-1]), window, floor)
    return WindowBound(
        sup_window=_abs_delta_sup(profile, n, floor, window),
        tail_factor=tail_factor(r, n),
        sup_all=_abs_delta_sup(profile, n, floor, reach),
        gamma=gamma_half_integer(n),
    )


@dataclass
class OctaveSmoothedEnergy:
    """Per-octave mean of Delta_phi^2 and max |Delta_phi|, largest scales first."""
    mean_square: np.ndarray
    max_abs: np.ndarray


def octave_smoothed_energy(measure: DiscreteMeasure, x, grid: ScaleGrid) -> OctaveSmoothedEnergy:
    point = as_query_point(x, measure.d)
    values = smoothed_delta_batch(measure, point, grid.radii)
    octaves = grid.octave_index
    count = grid.octave_count
    mean_square = np.array([np.mean(values[octaves == o] ** 2) for o in range(count)])
    max_abs = np.array([np.max(np.abs(values[octaves == o])) for o in range(count)])
    return OctaveSmoothedEnergy(mean_square, max_abs)


def domination_floor(h: float, grid: ScaleGrid) -> float:
    """10 * (4h/r_min)^2 * ln(r_max/r_min)."""
    return 10 * (4 * h / grid.r_min) ** 2 * math.log(grid.r_max / grid.r_min)


def domination_constant(measure: DiscreteMeasure, x, grid: ScaleGrid) -> float:
    """smoothed_s2 / max(s2, floor): measured constant C in smoothed_s2 <= C * s2 + floor."""
    from .multiscale import square_function
    result = square_function(measure, x, grid, smoothed=True)
    return result.smoothed_s2 / max(result.s2, domination_floor(measure.h, grid))
