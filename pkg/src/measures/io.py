"""
Measure file I/O - CSV point tables with a JSON metadata sidecar

Layout: header x0,...,x{d-1},w and one point per row. The sidecar sits next
to the CSV with the same stem and holds d, n, h, generator, params plus any
further generator bookkeeping.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from config.settings import get_settings
from src.utils.errors import FormatError
from .core import DiscreteMeasure, SignedMeasure, build_measure, signed_measure

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def sidecar_path(csv_path: PathLike) -> Path:
    return Path(csv_path).with_suffix('.json')


def column_names(d: int) -> list:
    return [f'x{i}' for i in range(d)] + ['w']


def write_json(payload: Dict[str, Any], path: PathLike) -> Path:
    """Write JSON with sorted keys and 2-space indentation."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(payload, f, sort_keys=True, indent=2)
        f.write('\n')
    return path


def _write_table(points: np.ndarray, weights: np.ndarray, d: int, path: Path) -> None:
    frame = pd.DataFrame(points.reshape(-1, d), columns=column_names(d)[:-1])
    frame['w'] = weights
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=get_settings().float_format, lineterminator='\n')


def measure_sidecar(measure: DiscreteMeasure) -> Dict[str, Any]:
    payload = dict(measure.metadata)
    payload.update({
        'd': measure.d,
        'n': measure.n,
        'h': measure.h,
        'generator': measure.metadata.get('generator', 'custom'),
        'params': measure.metadata.get('params', {}),
    })
    return payload


def write_measure(measure: DiscreteMeasure, csv_path: PathLike) -> Tuple[Path, Path]:
    """Write the measure CSV and its sidecar; returns both paths."""
    csv_path = Path(csv_path)
    _write_table(measure.points, measure.weights, measure.d, csv_path)
    meta_path = write_json(measure_sidecar(measure), sidecar_path(csv_path))
    logger.info(f"Wrote measure with {len(measure)} points to {csv_path}")
    return csv_path, meta_path


def read_sidecar(csv_path: PathLike) -> Optional[Dict[str, Any]]:
    path = sidecar_path(csv_path)
    if not path.exists():
        return None
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"Malformed measure sidecar {path}: {e}") from e


def _read_table(csv_path: Path, d: Optional[int]) -> Tuple[np.ndarray, np.ndarray, int]:
    if not csv_path.exists():
        raise FormatError(f"Measure file not found: {csv_path}")
    # Header read as data: longer rows fail in the parser, shorter rows surface as NaN.
    # Values stay strings until float() so 17-digit output round-trips exactly.
    try:
        frame = pd.read_csv(csv_path, header=None, dtype=str, keep_default_na=False)
    except pd.errors.ParserError as e:
        raise FormatError(f"Row width does not match the header in {csv_path}: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise FormatError(f"Cannot read measure file {csv_path}: {e}") from e

    columns = [str(c).strip() for c in frame.iloc[0]]
    width = d + 1 if d is not None else len(columns)
    if width < 2 or columns != column_names(width - 1):
        raise FormatError(
            f"Expected header {','.join(column_names(width - 1 if width > 1 else 1))} in {csv_path}, "
            f"got {','.join(columns)}"
        )
    try:
        values = frame.iloc[1:].replace("", np.nan).to_numpy(dtype=object).astype(np.float64)
    except ValueError as e:
        raise FormatError(f"Non-numeric value in {csv_path}: {e}") from e
    values = values.reshape(-1, width)
    if values.size and np.isnan(values).any():
        row = int(np.argmax(np.isnan(values).any(axis=1))) + 2
        raise FormatError(f"Row width != {width} (or empty field) at line {row} of {csv_path}")
    return values[:, :-1], values[:, -1], width - 1


def read_measure(csv_path: PathLike, n: Optional[int] = None, d: Optional[int] = None,
                 h: Optional[float] = None) -> DiscreteMeasure:
    """
    Read a measure CSV. Explicit n, d, h override the sidecar values.

    Raises:
        FormatError: wrong header, ragged rows or missing sidecar fields
    """
    csv_path = Path(csv_path)
    sidecar = read_sidecar(csv_path) or {}
    d = d if d is not None else sidecar.get('d')
    points, weights, d = _read_table(csv_path, d)
    n = n if n is not None else sidecar.get('n')
    h = h if h is not None else sidecar.get('h')
    if n is None or h is None:
        raise FormatError(f"Intrinsic dimension and resolution are unknown for {csv_path}; "
                          f"provide a sidecar or pass n and h")
    metadata = {k: v for k, v in sidecar.items() if k not in ('d', 'n', 'h')}
    measure = build_measure(points, weights, int(n), int(d), float(h), metadata)
    logger.info(f"Read measure with {len(measure)} points from {csv_path}")
    return measure


def write_signed_measure(nu: SignedMeasure, csv_path: PathLike) -> Path:
    """Signed measures share the CSV layout; w carries the sign."""
    csv_path = Path(csv_path)
    points, weights = nu.atoms()
    _write_table(points, weights, nu.d, csv_path)
    write_json({'d': nu.d, 'n': nu.n, 'h': nu.pos.h, 'signed': True, **nu.metadata}, sidecar_path(csv_path))
    return csv_path


def read_signed_measure(csv_path: PathLike, n: Optional[int] = None, d: Optional[int] = None,
                        h: Optional[float] = None) -> SignedMeasure:
    """Read atoms with signed weights; n and h default to the sidecar or 1."""
    sidecar = read_sidecar(csv_path) or {}
    d = d if d is not None else sidecar.get('d')
    points, weights, d = _read_table(Path(csv_path), d)
    n = n if n is not None else sidecar.get('n', 1)
    h = h if h is not None else sidecar.get('h', 1.0)
    return signed_measure(points, weights, int(n), d, float(h))
