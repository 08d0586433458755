"""
Synthetic measures with known rectifiability status

Every generator records ground truth in metadata: `rectifiable`, `generator`,
`params`, `domain` (parameter box per axis, or None for closed sets) and
`components` (index ranges with their labels).
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import get_settings
from src.measures.core import DiscreteMeasure, build_measure
from src.utils.errors import DimensionError, ResourceError, ValidationError
from src.utils.validators import validate_dimensions
from .specs import GeneratorKind, GeneratorSpec

logger = logging.getLogger(__name__)

ProfileFn = Callable[[np.ndarray], np.ndarray]


def _check_budget(count: int, what: str, budget: Optional[int] = None) -> None:
    budget = budget if budget is not None else get_settings().point_budget
    if count > budget:
        raise ResourceError(f"{what} needs {count} points, above the configured budget of {budget}")


def _grid_count(L: float, s: float) -> int:
    return int(math.floor(L / s + 1e-9)) + 1


def _check_grid(n: int, d: int, L: float, s: float) -> int:
    validate_dimensions(n, d)
    if not s > 0:
        raise ValidationError(f"Grid step s must be > 0, got {s}")
    if L < s:
        raise ValidationError(f"Side length L={L} must be >= grid step s={s}")
    count = _grid_count(L, s)
    _check_budget(count ** n, f"A {n}-dimensional grid with {count} nodes per axis")
    return count


def _parameter_grid(n: int, count: int, s: float) -> np.ndarray:
    """Grid nodes k*s, k = 0..count-1, in lexicographic order, shape (count**n, n)."""
    axis = np.arange(count, dtype=np.float64) * s
    mesh = np.meshgrid(*([axis] * n), indexing='ij')
    return np.column_stack([m.reshape(-1) for m in mesh])


def _component(start: int, stop: int, generator: str, rectifiable: bool, domain) -> Dict:
    return {'start': start, 'stop': stop, 'generator': generator,
            'rectifiable': rectifiable, 'domain': domain}


def gen_plane(n: int, d: int, L: float, s: float) -> DiscreteMeasure:
    """Grid of step s on [0,L]^n x {0}^(d-n), weight s^n per node, h = s."""
    count = _check_grid(n, d, L, s)
    params = _parameter_grid(n, count, s)
    points = np.zeros((len(params), d))
    points[:, :n] = params
    weights = np.full(len(params), s ** n)
    extent = (count - 1) * s
    domain = [[0.0, extent]] * n + [None] * (d - n)
    metadata = {
        'generator': GeneratorKind.PLANE.value,
        'params': {'n': n, 'd': d, 'L': L, 's': s},
        'rectifiable': True,
        'domain': domain,
        'components': [_component(0, len(points), 'plane', True, domain)],
    }
    logger.info(f"Generated plane n={n} d={d} with {len(points)} points")
    return build_measure(points, weights, n, d, s, metadata)


def profile_function(profile: str, n: int, d: int, L: float, amplitude: float = 0.1,
                     slope: float = 0.0, teeth: int = 1) -> Tuple[ProfileFn, float]:
    """
    Built-in graph profiles f: R^n -> R^(d-n) and their Lipschitz constants.

    Only the first output coordinate is nonzero. Sums over the n parameters
    carry a 1/sqrt(n) factor so the gradient norm stays below the constant.
    """
    outputs = d - n
    scale = 1.0 / math.sqrt(n)

    def lift(values: np.ndarray) -> np.ndarray:
        out = np.zeros((len(values), outputs))
        if outputs:
            out[:, 0] = values
        return out

    if profile == 'zero':
        return (lambda u: lift(np.zeros(len(u)))), 0.0
    if profile == 'linear':
        return (lambda u: lift(slope * u[:, 0])), abs(slope)
    if profile == 'sinusoid':
        return (lambda u: lift(amplitude * scale * np.sin(2 * np.pi * u / L).sum(axis=1))), \
            2 * np.pi * abs(amplitude) / L
    if profile == 'sawtooth':
        def triangle(u: np.ndarray) -> np.ndarray:
            t = teeth * u / L
            return amplitude * (1.0 - 4.0 * np.abs(t - np.floor(t) - 0.5))
        return (lambda u: lift(scale * triangle(u).sum(axis=1))), 4 * abs(amplitude) * teeth / L
    raise ValidationError(f"Unknown graph profile '{profile}'")


def graph_jacobian(profile: ProfileFn, u: np.ndarray, s: float) -> np.ndarray:
    """Central-difference Jacobian Df(u), shape (N, d-n, n)."""
    count, n = u.shape
    columns = []
    for axis in range(n):
        step = np.zeros(n)
        step[axis] = s
        columns.append((profile(u + step) - profile(u - step)) / (2 * s))
    return np.stack(columns, axis=2) if columns else np.zeros((count, 0, n))


def gen_lipschitz_graph(n: int, d: int, L: float, s: float, profile: str = 'sinusoid',
                        amplitude: float = 0.1, slope: float = 0.0, teeth: int = 1,
                        lipschitz_bound: Optional[float] = None,
                        profile_fn: Optional[ProfileFn] = None) -> DiscreteMeasure:
    """
    Points (u, f(u)) over the parameter grid with surface-measure weights
    sqrt(det(I + Df^T Df)) * s^n and h = s * sqrt(1 + Lambda^2).

    A custom profile_fn needs an explicit lipschitz_bound.
    """
    count = _check_grid(n, d, L, s)
    if profile_fn is None:
        profile_fn, analytic_bound = profile_function(profile, n, d, L, amplitude, slope, teeth)
    else:
        if lipschitz_bound is None:
            raise ValidationError("A custom profile requires lipschitz_bound")
        analytic_bound = lipschitz_bound
        profile = 'custom'
    bound = analytic_bound if lipschitz_bound is None else float(lipschitz_bound)
    if not math.isfinite(bound):
        raise ValidationError("Lipschitz bound must be finite")

    u = _parameter_grid(n, count, s)
    try:
        values = np.asarray(profile_fn(u), dtype=np.float64).reshape(len(u), d - n)
        jacobian = graph_jacobian(profile_fn, u, s)
    except (ValueError, TypeError, FloatingPointError) as e:
        raise ValidationError(f"Profile evaluation failed: {e}") from e
    if not np.all(np.isfinite(values)):
        raise ValidationError("Profile produced non-finite values")

    gram = np.eye(n)[None, :, :] + np.einsum('kji,kjl->kil', jacobian, jacobian)
    weights = np.sqrt(np.linalg.det(gram)) * s ** n

    warnings: List[str] = []
    measured = float(np.linalg.norm(jacobian, ord=2, axis=(1, 2)).max()) if d > n else 0.0
    if measured > bound * (1 + 1e-9) + 1e-12:
        warnings.append('lipschitz_bound_exceeded')
        logger.warning(f"Graph profile slope {measured:.6g} exceeds the declared bound {bound:.6g}")

    points = np.column_stack([u, values])
    extent = (count - 1) * s
    domain = [[0.0, extent]] * n + [None] * (d - n)
    metadata = {
        'generator': GeneratorKind.LIPSCHITZ_GRAPH.value,
        'params': {'n': n, 'd': d, 'L': L, 's': s, 'profile': profile, 'amplitude': amplitude,
                   'slope': slope, 'teeth': teeth, 'lipschitz_bound': bound},
        'rectifiable': True,
        'domain': domain,
        'measured_lipschitz': measured,
        'warnings': warnings,
        'components': [_component(0, len(points), 'lipschitz_graph', True, domain)],
    }
    h = s * math.sqrt(1 + bound ** 2)
    logger.info(f"Generated {profile} graph n={n} d={d} with {len(points)} points")
    return build_measure(points, weights, n, d, h, metadata)


def gen_circle(R: float, samples: int, seed: int = 0, random_phase: bool = False) -> DiscreteMeasure:
    """samples equally spaced points on the circle of radius R, weight 2*pi*R/samples."""
    if not R > 0:
        raise ValidationError(f"Radius R must be > 0, got {R}")
    if samples < 3:
        raise ValidationError(f"A circle needs at least 3 samples, got {samples}")
    _check_budget(samples, "The circle")
    spacing = 2 * np.pi / samples
    phase = np.random.default_rng(seed).uniform(0.0, spacing) if random_phase else 0.0
    angles = np.arange(samples) * spacing + phase
    points = R * np.column_stack([np.cos(angles), np.sin(angles)])
    weight = 2 * np.pi * R / samples
    metadata = {
        'generator': GeneratorKind.CIRCLE.value,
        'params': {'R': R, 'samples': samples, 'random_phase': random_phase, 'phase': float(phase)},
        'rectifiable': True,
        'domain': None,
        'components': [_component(0, samples, 'circle', True, None)],
    }
    return build_measure(points, np.full(samples, weight), 1, 2, weight, metadata)


def cantor4_centers(depth: int) -> np.ndarray:
    """Centers of the 4^depth generation-depth squares of the four-corner construction in [0,1]^2."""
    lower = np.zeros((1, 2))
    for level in range(1, depth + 1):
        gap = 3.0 * 4.0 ** (-level)
        offsets = np.array([[0.0, 0.0], [gap, 0.0], [0.0, gap], [gap, gap]])
        lower = (lower[:, None, :] + offsets[None, :, :]).reshape(-1, 2)
    return lower + 0.5 * 4.0 ** (-depth)


def gen_cantor4(depth: int) -> DiscreteMeasure:
    """Four-corner Cantor measure at generation depth, uniform weights 4^-depth."""
    if depth < 1:
        raise ValidationError(f"Cantor depth must be >= 1, got {depth}")
    _check_budget(4 ** depth, f"Cantor depth {depth}")
    points = cantor4_centers(depth)
    weight = 4.0 ** (-depth)
    metadata = {
        'generator': GeneratorKind.CANTOR4.value,
        'params': {'depth': depth},
        'rectifiable': False,
        'domain': None,
        'components': [_component(0, len(points), 'cantor4', False, None)],
    }
    logger.info(f"Generated cantor4 depth {depth} with {len(points)} points")
    return build_measure(points, np.full(len(points), weight), 1, 2, weight, metadata)


def gen_mixture(measures: Sequence[DiscreteMeasure], n: Optional[int] = None) -> DiscreteMeasure:
    """Concatenate measures of equal d; h is the largest component h."""
    if not measures:
        raise ValidationError("A mixture needs at least one component")
    d = measures[0].d
    for measure in measures:
        if measure.d != d:
            raise DimensionError(f"Mixture components differ in ambient dimension ({measure.d} != {d})")
    n = measures[0].n if n is None else n
    if len(measures) == 1 and n == measures[0].n:
        return measures[0]

    components = []
    offset = 0
    for measure in measures:
        labels = measure.metadata.get('components') or [
            _component(0, len(measure), measure.metadata.get('generator', 'custom'),
                       measure.metadata.get('rectifiable'), measure.metadata.get('domain'))
        ]
        for label in labels:
            shifted = dict(label)
            shifted['start'] += offset
            shifted['stop'] += offset
            components.append(shifted)
        offset += len(measure)

    labels = [c['rectifiable'] for c in components]
    metadata = {
        'generator': GeneratorKind.MIXTURE.value,
        'params': {'n': n, 'components': [m.metadata.get('params', {}) for m in measures]},
        'rectifiable': all(labels) if None not in labels else None,
        'components': components,
    }
    points = np.vstack([m.points for m in measures])
    weights = np.concatenate([m.weights for m in measures])
    h = max(m.h for m in measures)
    return build_measure(points, weights, n, d, h, metadata)


def point_labels(measure: DiscreteMeasure) -> Optional[np.ndarray]:
    """
    Per-point ground truth (1.0 rectifiable, 0.0 not, NaN unknown), or None
    when the measure carries no labels.
    """
    components = measure.metadata.get('components')
    if not components:
        label = measure.metadata.get('rectifiable')
        if label is None:
            return None
        return np.full(len(measure), 1.0 if label else 0.0)
    labels = np.full(len(measure), np.nan)
    for component in components:
        if component.get('rectifiable') is not None:
            labels[component['start']:component['stop']] = 1.0 if component['rectifiable'] else 0.0
    return labels


def generate(spec: GeneratorSpec) -> DiscreteMeasure:
    """Build the measure a GeneratorSpec describes."""
    params = spec.typed_params()
    if spec.kind == GeneratorKind.PLANE:
        measure = gen_plane(params.n, params.d, params.L, params.s)
    elif spec.kind == GeneratorKind.LIPSCHITZ_GRAPH:
        measure = gen_lipschitz_graph(params.n, params.d, params.L, params.s, params.profile,
                                      params.amplitude, params.slope, params.teeth, params.lipschitz_bound)
    elif spec.kind == GeneratorKind.CIRCLE:
        measure = gen_circle(params.R, params.samples, seed=spec.seed, random_phase=params.random_phase)
    elif spec.kind == GeneratorKind.CANTOR4:
        measure = gen_cantor4(params.depth)
    else:
        parts = [generate(component) for component in params.components]
        measure = gen_mixture(parts, params.n)
    return measure.with_metadata(seed=spec.seed, spec=spec.model_dump(mode='json'))
