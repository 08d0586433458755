"""
Rectifiability Diagnostics - Command Line Interface

Commands: generate, analyze, czdemo, blowup, report.
Exit codes: 0 success, 2 invalid input, 3 CZ audit failure, 4 resolution error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pydantic

from config.run_config import RunConfig, load_run_config, parse_value
from config.settings import get_settings
from src.cz import cz_decompose
from src.density import make_scale_grid
from src.diagnostics import AnalysisPipeline, ClassifierConfig, measure_info, select_points, summarize
from src.generators import GeneratorKind, GeneratorSpec, generate, point_labels
from src.measures import read_measure, read_signed_measure, write_json, write_measure
from src.reports import ReportWriter, read_verdicts, write_analysis
from src.tangent import blowup_trace
from src.utils.errors import AuditFailureError, FormatError, ResolutionError, ResourceError, ValidationError
from src.utils.logging_config import setup_logging
from src.utils.validators import parse_float_list, parse_point

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_AUDIT = 3
EXIT_RESOLUTION = 4

GENERATOR_FLAGS = ('n', 'd', 'L', 's', 'profile', 'amplitude', 'slope', 'teeth', 'R', 'samples', 'depth')


def _parse_params(pairs: Optional[List[str]]) -> Dict[str, Any]:
    """key=value pairs from repeated --param flags."""
    params: Dict[str, Any] = {}
    for pair in pairs or []:
        if '=' not in pair:
            raise ValidationError(f"--param expects key=value, got '{pair}'")
        key, value = pair.split('=', 1)
        params[key.strip()] = parse_value(value.strip())
    return params


def cmd_generate(args: argparse.Namespace) -> int:
    """Write a generator measure and its sidecar."""
    if args.spec:
        spec_path = Path(args.spec)
        if not spec_path.is_file():
            raise FormatError(f"Generator spec file not found: {spec_path}")
        spec = GeneratorSpec.model_validate_json(spec_path.read_text(encoding='utf-8'))
    else:
        params = {name: getattr(args, name) for name in GENERATOR_FLAGS if getattr(args, name) is not None}
        if args.random_phase:
            params['random_phase'] = True
        params.update(_parse_params(args.param))
        spec = GeneratorSpec(kind=args.kind, params=params, seed=args.seed)
    measure = generate(spec)
    output = Path(args.output or f"{spec.kind.value}.csv")
    write_measure(measure, output)
    print(f"{output}: {len(measure)} points, total mass {measure.total_mass:.17g}")
    return EXIT_OK


def _run_config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        'measure': args.measure,
        'kind': args.kind,
        'params': _parse_params(args.param) or None,
        'seed': args.seed,
        'octaves': args.octaves,
        'm': args.m,
        'safety': args.safety,
        'diam_fraction': args.diam_fraction,
        'points': args.points,
        'sample': args.sample,
        'slope_threshold': args.slope_threshold,
        'density_floor': args.density_floor,
        'boundary_margin_factor': args.boundary_margin_factor,
        'smoothed': True if args.smoothed else None,
        'output': args.output,
        'threads': args.threads,
    }
    return load_run_config(args.config, overrides)


def cmd_analyze(args: argparse.Namespace) -> int:
    """Profiles, square functions, verdicts and the summary report for one measure."""
    config = _run_config(args)
    spec = config.generator_spec()
    measure = generate(spec) if spec is not None else read_measure(config.measure)
    grid = make_scale_grid(measure, config.octaves, config.m, config.safety, config.diam_fraction)
    classifier = ClassifierConfig(
        slope_threshold=config.slope_threshold,
        density_floor=config.density_floor,
        boundary_margin_factor=config.boundary_margin_factor,
    )
    pipeline = AnalysisPipeline(measure, grid, classifier, threads=config.threads, smoothed=config.smoothed)
    ids = select_points(measure, config.points, config.sample, config.seed)
    results = pipeline.run(ids)
    run = config.model_dump(mode='json')
    report = pipeline.summarize(results, extra_config={'run': run})
    writer = ReportWriter(config.output)
    write_analysis(writer, results, report, run)
    fractions = ', '.join(f"{key} {value:.3f}" for key, value in report.fractions.items())
    print(f"{len(results)} points: {fractions}")
    return EXIT_OK


def cmd_czdemo(args: argparse.Namespace) -> int:
    """Decompose nu against mu at level lambda and write the audited result."""
    mu = read_measure(args.mu)
    nu = read_signed_measure(args.nu, n=mu.n, h=mu.h)
    output = Path(args.output)
    try:
        decomposition = cz_decompose(nu, mu, args.lam, strict=not args.lenient)
    except AuditFailureError as e:
        write_json({'decomposition': e.decomposition.to_dict(), 'audit': e.report.to_dict()}, output)
        raise
    write_json({'decomposition': decomposition.to_dict(), 'audit': decomposition.audit.to_dict()}, output)
    status = 'passed' if decomposition.audit.passed else 'failed'
    print(f"{len(decomposition.cubes)} cubes at lambda = {args.lam:g}; audit {status}")
    return EXIT_OK if decomposition.audit.passed else EXIT_AUDIT


def _trace_radii(args: argparse.Namespace) -> np.ndarray:
    if args.radii:
        return np.array(parse_float_list(args.radii))
    if args.r_max is None or args.r_min is None:
        raise ValidationError("Give --radii or both --r-max and --r-min")
    if not 0 < args.r_min < args.r_max:
        raise ValidationError(f"Need 0 < r_min < r_max, got {args.r_min} and {args.r_max}")
    return np.geomspace(args.r_max, args.r_min, args.count)


def cmd_blowup(args: argparse.Namespace) -> int:
    """Blowup trace at one point: CSV of scores and an SVG sparkline of beta2."""
    measure = read_measure(args.measure)
    if args.point_id is not None:
        if not 0 <= args.point_id < len(measure):
            raise ValidationError(f"Point id {args.point_id} outside 0..{len(measure) - 1}")
        point_id, x = args.point_id, measure.points[args.point_id]
    elif args.point is not None:
        point_id, x = None, parse_point(args.point, measure.d)
    else:
        raise ValidationError("Give --point or --point-id")
    trace = blowup_trace(measure, x, _trace_radii(args), window=args.window, probe_count=args.probes,
                         seed=args.seed, point_id=point_id)
    writer = ReportWriter(args.output)
    writer.write_trace(trace)
    writer.write_sparkline(trace.radii, trace.beta2)
    writer.write_json(trace.to_dict(), 'trace.json')
    print(f"beta2 slope {trace.slope:.4g}, min beta2 {trace.min_beta2:.4g} (along tested scales)")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    """Rebuild a summary report from a verdict CSV."""
    verdicts = read_verdicts(args.verdicts)
    labels, info = None, {}
    if args.measure:
        measure = read_measure(args.measure)
        labels, info = point_labels(measure), measure_info(measure)
    report = summarize(verdicts, ground_truth=labels, measure_info=info, config={'source': str(args.verdicts)})
    write_json(report.to_dict(), args.output)
    print(f"{report.points} verdicts summarized to {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='rectifiability', description='Rectifiability diagnostics for point-cloud measures')
    parser.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING, ERROR or CRITICAL')
    parser.add_argument('--log-file', default=None)
    commands = parser.add_subparsers(dest='command', required=True)

    generate_parser = commands.add_parser('generate', help='write a synthetic measure')
    generate_parser.add_argument('--kind', choices=[kind.value for kind in GeneratorKind])
    generate_parser.add_argument('--spec', help='JSON generator spec (needed for mixtures)')
    for name in ('n', 'd', 'teeth', 'samples', 'depth'):
        generate_parser.add_argument(f'--{name}', type=int)
    for name in ('L', 's', 'amplitude', 'slope', 'R'):
        generate_parser.add_argument(f'--{name}', type=float)
    generate_parser.add_argument('--profile', choices=['zero', 'linear', 'sinusoid', 'sawtooth'])
    generate_parser.add_argument('--random-phase', action='store_true')
    generate_parser.add_argument('--param', '--params', dest='param', action='append', help='extra key=value parameter')
    generate_parser.add_argument('--seed', type=int, default=0)
    generate_parser.add_argument('-o', '--out', '--output', dest='output')
    generate_parser.set_defaults(handler=cmd_generate)

    analyze_parser = commands.add_parser('analyze', help='per-point verdicts and summary report')
    analyze_parser.add_argument('--config', help='flat key = value config file; flags win')
    analyze_parser.add_argument('--measure')
    analyze_parser.add_argument('--kind', choices=[kind.value for kind in GeneratorKind])
    analyze_parser.add_argument('--param', '--params', dest='param', action='append')
    analyze_parser.add_argument('--seed', type=int)
    analyze_parser.add_argument('--octaves', type=float)
    analyze_parser.add_argument('--m', type=int)
    analyze_parser.add_argument('--safety', type=float)
    analyze_parser.add_argument('--diam-fraction', type=float)
    analyze_parser.add_argument('--points', choices=['all', 'random'])
    analyze_parser.add_argument('--sample', type=int)
    analyze_parser.add_argument('--slope-threshold', type=float)
    analyze_parser.add_argument('--density-floor', type=float)
    analyze_parser.add_argument('--boundary-margin-factor', type=float)
    analyze_parser.add_argument('--smoothed', action='store_true')
    analyze_parser.add_argument('--threads', type=int)
    analyze_parser.add_argument('-o', '--out', '--output', dest='output')
    analyze_parser.set_defaults(handler=cmd_analyze)

    cz_parser = commands.add_parser('czdemo', help='audited Calderon-Zygmund decomposition')
    cz_parser.add_argument('--nu', required=True, help='signed measure CSV')
    cz_parser.add_argument('--mu', required=True, help='reference measure CSV')
    cz_parser.add_argument('--lam', type=float, required=True)
    cz_parser.add_argument('--lenient', action='store_true', help='write failed audits instead of raising')
    cz_parser.add_argument('-o', '--out', '--output', dest='output', default='cz.json')
    cz_parser.set_defaults(handler=cmd_czdemo)

    blowup_parser = commands.add_parser('blowup', help='blowup trace at a point')
    blowup_parser.add_argument('--measure', required=True)
    blowup_parser.add_argument('--point', help='comma separated coordinates')
    blowup_parser.add_argument('--point-id', type=int)
    blowup_parser.add_argument('--radii', help='comma separated, decreasing')
    blowup_parser.add_argument('--r-max', type=float)
    blowup_parser.add_argument('--r-min', type=float)
    blowup_parser.add_argument('--count', type=int, default=8)
    blowup_parser.add_argument('--window', type=float)
    blowup_parser.add_argument('--probes', type=int)
    blowup_parser.add_argument('--seed', type=int, default=0)
    blowup_parser.add_argument('-o', '--out', '--output', dest='output', default='blowup')
    blowup_parser.set_defaults(handler=cmd_blowup)

    report_parser = commands.add_parser('report', help='summary report from a verdict CSV')
    report_parser.add_argument('--verdicts', required=True)
    report_parser.add_argument('--measure', help='measure CSV with ground-truth labels')
    report_parser.add_argument('-o', '--out', '--output', dest='output', default='report.json')
    report_parser.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level or settings.log_level, args.log_file or settings.log_file)
    try:
        return args.handler(args)
    except AuditFailureError as e:
        logger.error(f"Audit failure: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_AUDIT
    except ResolutionError as e:
        logger.error(f"Resolution error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOLUTION
    except (ValidationError, ResourceError, pydantic.ValidationError, OSError) as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
