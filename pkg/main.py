import argparse
import logging
import math
import sys
from typing import Any, Dict, List, Optional

from core.config import RunConfig
from core.omega import OmegaWord
from core.points import ExactPoint
from ergodic.orbits import simulate_orbit
from ergodic.statistics import (clt_experiment, correlation_sequence, digit_mean_stats,
                                empirical_density, indicator, log_digit_integral)
from expansion.expander import expand
from expansion.steering import AllowedDigits, classify_ending, steer_alpha, steer_digits
from exporters.csv_exporter import CSVExporter
from exporters.excel_exporter import ExcelExporter
from exporters.json_exporter import JSONExporter
from processors.verification import VerificationProcessor
from transfer.config import OperatorConfig
from transfer.perron_frobenius import gauss_density, solve_density, sweep_densities
from utils.error_handler import EXIT_FAILURE, EXIT_OK, handle_errors

logger = logging.getLogger('randcf')


def _fmt(value: float) -> str:
    """17 significant digits"""
    return format(float(value), '.17g')


def _provided(**kwargs) -> Dict[str, Any]:
    """Only the flags the user actually set; defaults live in the config models."""
    return {key: value for key, value in kwargs.items() if value is not None}


def _run_config(args) -> RunConfig:
    return RunConfig(**_provided(
        precision=args.prec,
        seed=getattr(args, 'seed', None),
        burn_in=getattr(args, 'burnin', None),
    ))


def _emit(text: str, path: Optional[str] = None) -> None:
    if path:
        CSVExporter.write(path, text)
        logger.info(f"Wrote {path}")
    else:
        sys.stdout.write(text)


def _print_trace(trace) -> None:
    print('digits ' + ','.join(str(d) for d in trace.digits))
    print('signs ' + ','.join('+' if s > 0 else '-' for s in trace.signs))
    print('omega ' + ''.join(str(b) for b in trace.omega_bits))
    print('convergents ' + ','.join(f"{p}/{q}" for p, q in trace.convergents))
    print(f"terminated {'true' if trace.terminated else 'false'}")


@handle_errors
def run_expand(args) -> int:
    config = _run_config(args)
    x = ExactPoint.parse(args.x, config.precision)
    trace = expand(x, OmegaWord.parse(args.omega), args.n)
    if args.json:
        print(JSONExporter(trace).create_raw_export())
        return EXIT_OK
    _print_trace(trace)
    if trace.terminated:
        ending = classify_ending(trace)
        print(f"ending {ending.kind} n={ending.n} k={ending.k} twos={ending.twos}")
    return EXIT_OK


def _parse_ps(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise ValueError(f"Invalid p list '{text}': {e}") from e


@handle_errors
def run_density(args) -> int:
    settings = _provided(grid=args.grid, k_max=args.kmax, tol=args.tol,
                         tail_mode=args.tail, max_iter=args.max_iter)
    exporter = CSVExporter()

    if args.sweep:
        base = OperatorConfig(p=1.0, **settings)
        rows = []
        for p, (h, diagnostics) in sweep_densities(_parse_ps(args.sweep), base).items():
            rows.append({
                'p': p,
                'h0': float(h(0.0)),
                'h1': float(h(1.0)),
                'h_min': diagnostics.h_min,
                'h_max': diagnostics.h_max,
                'variation': diagnostics.variation,
                'iters': diagnostics.iters,
            })
        _emit(exporter.create_table_csv(rows), args.out)
        return EXIT_OK

    if args.p is None:
        raise ValueError("density needs --p or --sweep")
    config = OperatorConfig(p=args.p, **settings)
    h, diagnostics = solve_density(config)
    _emit(exporter.create_density_csv(h), args.out)
    if args.diag:
        JSONExporter(diagnostics).save(args.diag)
        logger.info(f"Wrote {args.diag}")
    if config.p == 1:
        reference = gauss_density(config.grid)
        logger.info(f"sup distance to the Gauss density: {h.distance(reference, norm='sup'):.3e}")
    return EXIT_OK


@handle_errors
def run_orbit(args) -> int:
    config = _run_config(args)
    orbit = simulate_orbit(args.p, float(args.x0), args.n, burn_in=config.burn_in,
                           seed=config.seed, near_zero=config.near_zero)
    reference = CSVExporter.read_density_csv(args.ref) if args.ref else None
    histogram = empirical_density(orbit.samples, bins=args.bins, reference=reference)
    _emit(CSVExporter().create_histogram_csv(histogram.edges, histogram.masses), args.out)

    summary = {'p': args.p, 'n': args.n, 'bins': histogram.bins,
               'guard_events': orbit.guard_events, 'l1_distance': histogram.l1_distance}
    if args.out:
        print(JSONExporter(summary).create_raw_export())
    elif histogram.l1_distance is not None:
        logger.info(f"L1 distance to {args.ref}: {histogram.l1_distance:.6f}")
    return EXIT_OK


def _centred_half_indicator(p: float, grid: Optional[int]):
    """Indicator of (1/2, 1] minus its stationary mass."""
    if p == 1:
        mass = 1.0 - math.log(1.5) / math.log(2.0)
    else:
        h, _ = solve_density(OperatorConfig(**_provided(p=p, grid=grid)))
        mass = h.integrate(0.5, 1.0)
    return indicator(0.5, 1.0, mass)


@handle_errors
def run_stats(args) -> int:
    config = _run_config(args)
    report: Dict[str, Any] = {}
    digits = args.digits or not (args.clt or args.corr)

    if digits:
        digit_stats = digit_mean_stats(args.p, args.n, args.trials, config.seed, config.burn_in,
                                       near_zero=config.near_zero)
        report['digits'] = digit_stats.to_dict()
        if args.p == 1:
            oracle = log_digit_integral(gauss_density(), 1.0)
            report['digits']['oracle_log_geo_mean'] = oracle
            report['digits']['oracle_geo_mean'] = math.exp(oracle)

    if args.clt:
        observable = _centred_half_indicator(args.p, args.grid)
        report['clt'] = clt_experiment(observable, args.p, args.n, args.trials,
                                       config.seed, config.burn_in).to_dict()

    if args.corr:
        observable = _centred_half_indicator(args.p, args.grid)
        c = correlation_sequence(observable, observable, args.p, args.corr, args.n,
                                 config.seed, config.burn_in)
        if args.corr_out:
            CSVExporter.write(args.corr_out, CSVExporter().create_correlation_csv(c))
            logger.info(f"Wrote {args.corr_out}")
        report['correlation'] = [float(v) for v in c]

    print(JSONExporter(report).create_raw_export())
    return EXIT_OK


@handle_errors
def run_steer(args) -> int:
    config = _run_config(args)
    x = ExactPoint.parse(args.x, config.precision)
    result = steer_digits(x, AllowedDigits.parse(args.digits), args.n)
    if args.json:
        data = result.trace.to_dict()
        data['failed_at'] = result.failed_at
        print(JSONExporter(data).create_raw_export())
        return EXIT_OK
    _print_trace(result.trace)
    print('status ok' if result.succeeded else f"status failed_at={result.failed_at}")
    return EXIT_OK


@handle_errors
def run_alpha(args) -> int:
    config = _run_config(args)
    x = ExactPoint.parse(args.x, config.precision)
    steering = steer_alpha(x, args.alpha, args.n)
    print('omega ' + ''.join(str(b) for b in steering.bits))
    print('digits ' + ','.join(str(d) for d in steering.trace.digits))
    print('orbit ' + ','.join(_fmt(point) for point in steering.orbit))
    print(f"max_discrepancy {_fmt(steering.max_discrepancy)}")
    return EXIT_OK


@handle_errors
def run_verify(args) -> int:
    config = _run_config(args)
    processor = VerificationProcessor(
        runs=args.runs,
        seed=config.seed,
        precision=config.precision,
        **_provided(grid=args.grid, k_max=args.kmax),
    )
    report = processor.process_all_data()

    exporter = JSONExporter(report)
    if args.out:
        exporter.save(args.out, report=True)
        logger.info(f"Wrote {args.out}")
    else:
        print(exporter.create_export())
    if args.xlsx:
        with open(args.xlsx, 'wb') as handle:
            handle.write(ExcelExporter(report).create_workbook())
        logger.info(f"Wrote {args.xlsx}")

    for name, section in report.items():
        if not section['summary']['passed']:
            first = section['data'][0] if section['data'] else {}
            logger.error(f"Verification failed: {name} ({section['summary']['failures']} failures) "
                         f"{first.get('check', '')} {first.get('detail', '')}".rstrip())
    return EXIT_OK if processor.passed else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='randcf',
        description='Random continued fractions: expansions, invariant densities and ergodic experiments',
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='warnings and errors only')
    parser.add_argument('--prec', type=int, help='binary precision of real points (default 256)')
    commands = parser.add_subparsers(dest='command', required=True)

    cmd = commands.add_parser('expand', help='expand x under an omega word')
    cmd.add_argument('--x', required=True, help="a/b, integer, decimal or surd:a:n:b")
    cmd.add_argument('--omega', required=True, help="0110, 01..., 1(01)... or bernoulli:p:seed")
    cmd.add_argument('--n', type=int, default=20, help='maximum number of digits')
    cmd.add_argument('--json', action='store_true', help='print the trace as JSON')
    cmd.set_defaults(handler=run_expand)

    cmd = commands.add_parser('density', help='solve for the invariant density h_p')
    cmd.add_argument('--p', type=float)
    cmd.add_argument('--grid', type=int)
    cmd.add_argument('--kmax', type=int)
    cmd.add_argument('--tol', type=float)
    cmd.add_argument('--max-iter', dest='max_iter', type=int)
    cmd.add_argument('--tail', choices=['drop', 'bound-correct', 'asymptotic'],
                     help='series tail for k > kmax (default asymptotic; drop and bound-correct truncate)')
    cmd.add_argument('--out', help='density CSV (x,h); stdout when omitted')
    cmd.add_argument('--diag', help='diagnostics JSON')
    cmd.add_argument('--sweep', help='comma separated p values')
    cmd.set_defaults(handler=run_density)

    cmd = commands.add_parser('orbit', help='histogram of one random orbit')
    cmd.add_argument('--p', type=float, required=True)
    cmd.add_argument('--x0', type=float, required=True)
    cmd.add_argument('--n', type=int, required=True)
    cmd.add_argument('--burnin', type=int)
    cmd.add_argument('--bins', type=int, default=64)
    cmd.add_argument('--seed', type=int)
    cmd.add_argument('--out', help='histogram CSV; stdout when omitted')
    cmd.add_argument('--ref', help='density CSV to compare against')
    cmd.set_defaults(handler=run_orbit)

    cmd = commands.add_parser('stats', help='digit means, CLT and correlations')
    cmd.add_argument('--p', type=float, required=True)
    cmd.add_argument('--n', type=int, required=True)
    cmd.add_argument('--trials', type=int, default=100)
    cmd.add_argument('--seed', type=int)
    cmd.add_argument('--burnin', type=int)
    cmd.add_argument('--grid', type=int, help='grid of the density used to centre observables')
    cmd.add_argument('--digits', action='store_true', help='digit-mean statistics (default)')
    cmd.add_argument('--clt', action='store_true', help='CLT for the centred indicator of (1/2,1]')
    cmd.add_argument('--corr', type=int, metavar='N', help='correlations c(0..N)')
    cmd.add_argument('--corr-out', dest='corr_out', help='correlation CSV (n,c)')
    cmd.set_defaults(handler=run_stats)

    cmd = commands.add_parser('steer', help='steer digits into a set')
    cmd.add_argument('--x', required=True)
    cmd.add_argument('--digits', required=True, help='odd, even or set:a,b,...')
    cmd.add_argument('--n', type=int, default=100)
    cmd.add_argument('--json', action='store_true')
    cmd.set_defaults(handler=run_steer)

    cmd = commands.add_parser('alpha', help='embed an alpha-continued fraction orbit')
    cmd.add_argument('--alpha', required=True)
    cmd.add_argument('--x', required=True)
    cmd.add_argument('--n', type=int, default=25)
    cmd.set_defaults(handler=run_alpha)

    cmd = commands.add_parser('verify', help='run the invariant suite')
    cmd.add_argument('--runs', type=int, default=100)
    cmd.add_argument('--seed', type=int)
    cmd.add_argument('--grid', type=int)
    cmd.add_argument('--kmax', type=int)
    cmd.add_argument('--out', help='report JSON; stdout when omitted')
    cmd.add_argument('--xlsx', help='report workbook')
    cmd.set_defaults(handler=run_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format='%(levelname)s %(name)s: %(message)s')
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
