"""
Command-line front end of the HLZeta workbench.

    python -m hlzeta.cli verify "kubert.*" --format csv --out kubert.csv
    python -m hlzeta.cli table franel2 --n 1:4 --m 1:4
    python -m hlzeta.cli scan growth_f --x-min 10 --x-max 1e6 --points 60
    python -m hlzeta.cli eval f_hl 1.0

Exit codes: 0 when every selected identity passes, 1 when one fails, 2 on an
engine or configuration error.
"""
import argparse
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, TextIO

import numpy as np
from pydantic import ValidationError

from hlzeta import __version__
from hlzeta.core.exceptions import CapacityError, ConfigError, HLZetaException
from hlzeta.models.schemas import IdentityReport, SuiteConfig, TruncationPolicy
from hlzeta.services import franel, hlseries, sawtooth
from hlzeta.services.suite import identity_suite
from hlzeta.utils.helpers import (
    json_line,
    log_grid,
    parse_complex,
    parse_int_range,
    parse_tolerance_overrides,
    read_config_file,
    write_csv,
)
from hlzeta.utils.logger import logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2

REPORT_COLUMNS = ["identity_id", "lhs", "rhs", "abs_diff", "tolerance", "pass", "anchor"]

# Config-file keys mapped onto SuiteConfig fields
_CONFIG_KEYS = {
    "sieve_bound": "sieve_bound",
    "jobs": "jobs",
    "format": "output_format",
    "output_format": "output_format",
    "out": "output_path",
    "output_path": "output_path",
}


def build_suite_config(args: argparse.Namespace) -> SuiteConfig:
    """
    Merge settings, the key=value config file and command-line flags.

    Flags win over the file, the file wins over HLZETA_* settings.
    ``tol.<identity_id> = value`` lines in the file add tolerance overrides.

    Raises:
        ConfigError: On unknown keys or invalid values
    """
    raw = read_config_file(args.config) if args.config else {}
    fields: Dict[str, Any] = {}
    overrides: Dict[str, float] = {}
    for key, value in raw.items():
        if key.startswith("tol."):
            overrides.update(parse_tolerance_overrides([f"{key[4:]}={value}"]))
        elif key in _CONFIG_KEYS:
            fields[_CONFIG_KEYS[key]] = value
        else:
            raise ConfigError(f"Unknown config key {key!r}", key=key)

    overrides.update(parse_tolerance_overrides(args.tol))
    if args.jobs is not None:
        fields["jobs"] = args.jobs
    if args.format is not None:
        fields["output_format"] = args.format
    if args.out is not None:
        fields["output_path"] = args.out

    try:
        return SuiteConfig(tolerance_overrides=overrides, **fields)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first.get("loc", ()))
        raise ConfigError(f"Invalid configuration: {first.get('msg')} ({key})", key=key)


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """Open the output file (UTF-8, LF endings) or fall back to stdout."""
    if not path:
        yield sys.stdout
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="\n") as stream:
        yield stream


def _report_row(report: IdentityReport) -> List[Any]:
    return [report.identity_id, report.lhs, report.rhs, report.abs_diff, report.tolerance, report.passed, report.anchor]


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def cmd_verify(args: argparse.Namespace) -> int:
    """Run the selected identities and stream one report line each, in canonical order."""
    config = build_suite_config(args)
    selectors = args.selectors or ["all"]
    identity_suite.select(selectors)
    status = EXIT_OK

    def outcomes():
        nonlocal status
        for check, outcome in identity_suite.iter_run(selectors, config):
            if isinstance(outcome, Exception):
                status = EXIT_ERROR
                print(f"{check.identity_id}: {type(outcome).__name__}: {outcome}", file=sys.stderr)
            elif not outcome.passed and status == EXIT_OK:
                status = EXIT_FAILED
            yield check, outcome

    with open_output(config.output_path) as stream:
        if config.output_format == "csv":
            rows = (
                _report_row(outcome) if isinstance(outcome, IdentityReport)
                else [check.identity_id, "", "", "", check.tolerance or "", "error", check.anchor]
                for check, outcome in outcomes()
            )
            write_csv(REPORT_COLUMNS, rows, stream)
        else:
            for check, outcome in outcomes():
                if isinstance(outcome, IdentityReport):
                    stream.write(json_line(outcome.to_record()))
                else:
                    stream.write(json_line({
                        "identity_id": check.identity_id,
                        "error": f"{type(outcome).__name__}: {outcome}",
                    }))
                stream.flush()

    logger.info("verify finished", exit_code=status)
    return status


def cmd_table(args: argparse.Namespace) -> int:
    """Write a deterministic CSV table of Franel integrals or Fourier coefficients."""
    if args.kind == "franel2":
        n_lo, n_hi = parse_int_range(args.n)
        m_lo, m_hi = parse_int_range(args.m)
        if n_hi > 12 or m_hi > 12:
            raise CapacityError("franel2 tables support n, m <= 12", requested=max(n_hi, m_hi), capacity=12)
        header = ["n", "m", "closed_form", "value", "oracle", "abs_diff"]

        def rows():
            for n in range(n_lo, n_hi + 1):
                for m in range(m_lo, m_hi + 1):
                    closed = franel.franel2_closed(n, m)
                    oracle = franel.franel2_oracle(n, m)
                    value = closed.evaluate()
                    yield [n, m, str(closed), value, float(oracle.value), abs(value - float(oracle.value))]

    elif args.kind == "franel1":
        header = ["beta", "value", "error_bound"]

        def rows():
            # k/(points - 1) keeps decimal grids on their exact period
            steps = max(args.points - 1, 1)
            for k in range(steps + 1):
                beta = k / steps
                result = franel.franel_first_kind(beta)
                yield [beta, float(result.value), result.error_bound]

    else:
        n_lo, n_hi = parse_int_range(args.n)
        if n_hi > 200:
            raise CapacityError("an_coeffs supports n <= 200", requested=n_hi, capacity=200)
        header = ["theta", "n", "a_n_series", "a_n_direct", "abs_diff"]

        def rows():
            for n in range(n_lo, n_hi + 1):
                series = sawtooth.fourier_coeff_an(args.theta, n)
                direct = sawtooth.direct_an(args.theta, n)
                yield [args.theta, n, float(series.value), float(direct.value), abs(series.value - direct.value)]

    with open_output(args.out) as stream:
        count = write_csv(header, rows(), stream)
    logger.info("table written", kind=args.kind, rows=count, out=args.out or "stdout")
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    """Write growth, Davenport, Saffari and related trend tables as CSV."""
    if args.kind == "growth_f":
        header = ["x", "f", "error_bound", "running_max", "envelope"]
        data = hlseries.growth_scan(log_grid(args.x_min, args.x_max, args.points), args.epsilon)
    elif args.kind == "davenport":
        header = ["x", "N", "partial_sum", "target", "abs_diff"]
        x_grid = np.linspace(args.x_min, args.x_max, args.points)
        data = hlseries.davenport_scan(x_grid, [int(v) for v in args.n_grid.split(",")])
    elif args.kind == "saffari":
        header = ["x", "lhs", "log_scale", "ratio", "sup_theta_minus_u"]
        data, fitted = hlseries.saffari_scan(log_grid(args.x_min, args.x_max, args.points))
        logger.info("saffari constant fitted", constant=fitted)
    elif args.kind == "mobius_exp":
        header = ["y", "max_ratio", "argmax_x", "mertens_ratio"]
        y_grid = [int(v) for v in args.n_grid.split(",")]
        x_grid = np.linspace(0.0, 1.0, args.points, endpoint=False)
        mertens = dict(hlseries.mertens_column(y_grid))
        data = [(y, ratio, x, mertens[y]) for y, ratio, x in hlseries.mobius_exp_scan(y_grid, x_grid)]
    elif args.kind == "divisor":
        header = ["x", "S_1", "S_1_remainder", "S^1", "S^1_remainder_over_x"]
        data = sawtooth.divisor_scan(log_grid(args.x_min, args.x_max, args.points))
    else:
        header = ["N", "partial_sum", "target"]
        data = sawtooth.bod_pointwise_scan(args.theta, args.x, int(args.n_grid.split(",")[-1]))

    with open_output(args.out) as stream:
        count = write_csv(header, data, stream)
    logger.info("scan written", kind=args.kind, rows=count, out=args.out or "stdout")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    """Evaluate one series at a point and print value and bound."""
    policy = TruncationPolicy(tail_tolerance=args.tail_tolerance) if args.tail_tolerance else None
    result = hlseries.eval_named(args.kind, parse_complex(args.z), s=args.s, nu=args.nu, policy=policy)
    record = {"kind": args.kind, "z": args.z, "value": result.value, "error_bound": result.error_bound, "terms": result.terms}
    with open_output(args.out) as stream:
        if args.format == "csv":
            write_csv(list(record), [list(record.values())], stream)
        else:
            stream.write(json_line(record))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--out", help="Output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "jsonl"], help="Report format for verify and eval")
    common.add_argument("--tol", action="append", metavar="ID=VALUE", help="Tolerance override (repeatable)")
    common.add_argument("--jobs", type=int, help="Worker threads for verify")

    parser = argparse.ArgumentParser(
        prog="hlzeta",
        description="Verification workbench for the Hardy-Littlewood series identities.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True)

    verify = verbs.add_parser("verify", parents=[common], help="Run identity checks")
    verify.add_argument("selectors", nargs="*", help='Identity ids, prefixes or patterns (default "all")')
    verify.add_argument("--list", action="store_true", help="List the selected identities without running them")
    verify.set_defaults(handler=cmd_verify)

    table = verbs.add_parser("table", parents=[common], help="Write a CSV table")
    table.add_argument("kind", choices=["franel2", "franel1", "an_coeffs"])
    table.add_argument("--n", default="1:4", help="n range LO:HI")
    table.add_argument("--m", default="1:4", help="m range LO:HI (franel2)")
    table.add_argument("--theta", type=float, default=0.5, help="theta for an_coeffs")
    table.add_argument("--points", type=int, default=11, help="beta grid points for franel1")
    table.set_defaults(handler=cmd_table)

    scan = verbs.add_parser("scan", parents=[common], help="Write a trend scan as CSV")
    scan.add_argument("kind", choices=["growth_f", "davenport", "saffari", "mobius_exp", "divisor", "bod"])
    scan.add_argument("--x-min", type=float, default=10.0, dest="x_min")
    scan.add_argument("--x-max", type=float, default=1e6, dest="x_max")
    scan.add_argument("--points", type=int, default=41)
    scan.add_argument("--epsilon", type=float, default=0.1, help="Envelope exponent offset for growth_f")
    scan.add_argument("--n-grid", default="1000,10000,100000", dest="n_grid", help="Comma separated N or y values")
    scan.add_argument("--theta", type=float, default=0.5, help="theta for bod")
    scan.add_argument("--x", type=float, default=0.75, help="x for bod")
    scan.set_defaults(handler=cmd_scan)

    evaluate = verbs.add_parser("eval", parents=[common], help="Evaluate a series at a point")
    evaluate.add_argument("kind", help="Series kind (f_hl, F_cos, sin2_sum, G_tenenbaum, chi, chi_tilde, G_nu) "
                                       "or power-series form (sin_form, onemcos_form, exp_form)")
    evaluate.add_argument("z", help="Argument: a, a+bj or a,b")
    evaluate.add_argument("--s", type=float, help="Exponent for chi and chi_tilde")
    evaluate.add_argument("--nu", type=float, help="Index for G_nu")
    evaluate.add_argument("--tail-tolerance", type=float, dest="tail_tolerance")
    evaluate.set_defaults(handler=cmd_eval)

    return parser


def cmd_list(args: argparse.Namespace) -> int:
    with open_output(args.out) as stream:
        for check in identity_suite.select(args.selectors or ["all"]):
            stream.write(f"{check.identity_id}\t{check.anchor}\n")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, dispatch the verb and map errors to exit code 2."""
    args = build_parser().parse_args(argv)
    handler = cmd_list if getattr(args, "list", False) else args.handler
    try:
        return handler(args)
    except HLZetaException as e:
        logger.error("command failed", verb=args.verb, error_type=type(e).__name__, error=str(e))
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
