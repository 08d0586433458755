"""
Report Writer - CSV tables, JSON reports and SVG sparklines for analysis runs

Every file is a pure function of its inputs: floats use the configured
%.17g format, JSON keys are sorted and SVG output carries no date or random ids.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import matplotlib
matplotlib.use('Agg')
from matplotlib import rc_context
from matplotlib.figure import Figure
import numpy as np
import pandas as pd

from config.settings import get_settings
from src.diagnostics.models import PointVerdict, SummaryReport, Verdict
from src.diagnostics.pipeline import PointResult
from src.measures.io import write_json
from src.tangent.scores import BETA2_FLOOR, BlowupTrace
from src.utils.errors import FormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

VERDICT_COLUMNS = ['point_id', 's2', 'slope', 'theta_lo', 'theta_hi', 'boundary', 'condition_c', 'verdict']
SQUARE_FUNCTION_COLUMNS = ['point_id', 's2', 'slope', 'theta_lo', 'theta_hi', 'boundary']
OCTAVE_COLUMNS = ['point_id', 'octave', 's2_partial', 'increment']
TRACE_COLUMNS = ['point_id', 'r', 'beta2', 'c_fit', 'max_rel_dev']

SVG_RC = {'svg.hashsalt': 'rectifiability', 'svg.fonttype': 'none'}


class ReportWriter:
    """Write analysis artifacts into one output directory."""

    def __init__(self, output_dir: PathLike):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.float_format = get_settings().float_format

    def _write_frame(self, frame: pd.DataFrame, name: str) -> Path:
        path = self.output_dir / name
        frame.to_csv(path, index=False, float_format=self.float_format, lineterminator='\n')
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_profiles(self, results: Sequence[PointResult], name: str = 'profile.csv') -> Path:
        """theta and Delta at every grid radius, one row per (point, radius)."""
        rows = []
        for result in results:
            profile = result.profile
            smoothed = profile.smoothed_delta
            for k, (r, theta, delta) in enumerate(zip(profile.radii, profile.theta, profile.delta)):
                row = {'point_id': profile.point_id, 'r': r, 'theta': theta, 'delta': delta}
                if smoothed is not None:
                    row['smoothed_delta'] = smoothed[k]
                rows.append(row)
        return self._write_frame(pd.DataFrame(rows, columns=self._profile_columns(results)), name)

    @staticmethod
    def _profile_columns(results: Sequence[PointResult]) -> List[str]:
        columns = ['point_id', 'r', 'theta', 'delta']
        if results and results[0].profile.smoothed_delta is not None:
            columns.append('smoothed_delta')
        return columns

    def write_square_functions(self, results: Sequence[PointResult], name: str = 'square_function.csv') -> Path:
        """One row per point: s2, its octave slope, the density bounds and the boundary flag."""
        rows = [{'point_id': result.verdict.point_id, 's2': result.verdict.s2, 'slope': result.verdict.slope,
                 'theta_lo': result.verdict.theta_lo, 'theta_hi': result.verdict.theta_hi,
                 'boundary': int(result.verdict.boundary)} for result in results]
        return self._write_frame(pd.DataFrame(rows, columns=SQUARE_FUNCTION_COLUMNS), name)

    def write_octave_increments(self, results: Sequence[PointResult],
                                name: str = 'square_function_octaves.csv') -> Path:
        """Cumulative s2 per octave with its increment."""
        rows = []
        for result in results:
            sqfn = result.square_function
            for octave, (partial, increment) in enumerate(zip(sqfn.s2_partial, sqfn.octave_increments)):
                rows.append({'point_id': sqfn.point_id, 'octave': octave,
                             's2_partial': partial, 'increment': increment})
        return self._write_frame(pd.DataFrame(rows, columns=OCTAVE_COLUMNS), name)

    def write_verdicts(self, verdicts: Sequence[PointVerdict], name: str = 'verdicts.csv') -> Path:
        frame = pd.DataFrame([item.to_row() for item in verdicts], columns=VERDICT_COLUMNS)
        return self._write_frame(frame, name)

    def write_report(self, report: SummaryReport, name: str = 'report.json') -> Path:
        return write_json(report.to_dict(), self.output_dir / name)

    def write_json(self, payload: Dict[str, Any], name: str) -> Path:
        return write_json(payload, self.output_dir / name)

    def write_trace(self, trace: BlowupTrace, name: str = 'trace.csv') -> Path:
        return self._write_frame(pd.DataFrame(trace.rows(), columns=TRACE_COLUMNS), name)

    def write_sparkline(self, radii: Sequence[float], values: Sequence[float], name: str = 'trace.svg',
                        floor: float = BETA2_FLOOR) -> Path:
        """Polyline of log10(value) against log10(r), values floored, largest r on the left."""
        path = self.output_dir / name
        x = np.log10(np.asarray(radii, dtype=np.float64))
        y = np.log10(np.maximum(np.asarray(values, dtype=np.float64), floor))
        with rc_context(SVG_RC):
            fig = Figure(figsize=(4.0, 1.2))
            ax = fig.add_subplot()
            ax.plot(x, y, color='#2E74B5', linewidth=1.2, marker='o', markersize=2.5)
            ax.invert_xaxis()
            ax.set_axis_off()
            fig.savefig(path, format='svg', metadata={'Date': None}, bbox_inches='tight')
        logger.info(f"Wrote sparkline with {len(x)} points to {path}")
        return path


def read_verdicts(path: PathLike) -> List[PointVerdict]:
    """
    Rebuild verdicts from a verdict CSV.

    Raises:
        FormatError: missing file, wrong columns or an unknown verdict
    """
    path = Path(path)
    if not path.exists():
        raise FormatError(f"Verdict file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FormatError(f"Cannot read verdict file {path}: {e}") from e
    if list(frame.columns) != VERDICT_COLUMNS:
        raise FormatError(f"Expected columns {','.join(VERDICT_COLUMNS)} in {path}, got {','.join(frame.columns)}")
    verdicts = []
    for row in frame.itertuples(index=False):
        try:
            kind = Verdict(row.verdict)
        except ValueError as e:
            raise FormatError(f"Unknown verdict '{row.verdict}' in {path}") from e
        verdicts.append(PointVerdict(
            point_id=int(row.point_id),
            s2=float(row.s2),
            slope=float(row.slope),
            theta_lo=float(row.theta_lo),
            theta_hi=float(row.theta_hi),
            boundary=bool(row.boundary),
            verdict=kind,
            condition_c=float(row.condition_c),
        ))
    return verdicts


def write_analysis(writer: ReportWriter, results: Sequence[PointResult], report: SummaryReport,
                   config: Optional[Dict[str, Any]] = None) -> Dict[str, Path]:
    """All analyze artifacts: profiles, square functions, verdicts, report and config."""
    paths = {
        'profile': writer.write_profiles(results),
        'square_function': writer.write_square_functions(results),
        'octaves': writer.write_octave_increments(results),
        'verdicts': writer.write_verdicts([result.verdict for result in results]),
        'report': writer.write_report(report),
    }
    if config is not None:
        paths['config'] = writer.write_json(config, 'config.json')
    return paths
