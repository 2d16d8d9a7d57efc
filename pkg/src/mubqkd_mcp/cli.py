"""
Command-line front end: simulations, theory checks and figure tables.

Exit codes: 0 on success, 1 when a statistical or certification gate fails,
2 on usage or validation errors.
"""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .analysis import (
    compare,
    detection_probability_closed,
    fig2_table,
    fig3_table,
    qdc_success_monte_carlo,
)
from .config import EveStrategy, ProtocolConfig, load_config
from .errors import MubQkdError
from .galois_field import format_polynomial, make_field
from .mub_builder import MUB_THRESHOLD, build_mub, mub_check
from .protocol_sim import run_session
from .tools_analysis import FIG2_COLUMNS, FIG3_COLUMNS
from .tools_export import render, write_text
from .tools_field import OPERATION_SYMBOLS, TABLE_KINDS, field_table_rows, operation_matrix

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_GATE_FAILED = 1
EXIT_USAGE = 2

FIELD_TABLE_KINDS = ("both",) + TABLE_KINDS

LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"


def _add_global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """
    Options accepted before or after the subcommand.

    The subcommand copies default to SUPPRESS so they only override values
    that were actually given after the subcommand.
    """

    def default(value: Any) -> Any:
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--out", default=default(None), help="Write output to FILE instead of stdout")
    parser.add_argument(
        "--format", choices=["csv", "json", "yaml"], default=default("csv"), help="Output format"
    )
    parser.add_argument("--seed", type=int, default=default(None), help="Root seed")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=default(os.environ.get("MUBQKD_LOG_LEVEL", "WARNING").upper()),
        help="Logging verbosity",
    )
    parser.add_argument(
        "--config", default=default(None), help="JSON/YAML protocol configuration; flags override it"
    )


def _field_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, default=None, help="Odd prime characteristic")
    parser.add_argument("--m", type=int, default=None, help="Extension degree")


def _protocol_options(parser: argparse.ArgumentParser) -> None:
    _field_options(parser)
    parser.add_argument("--rounds", type=int, default=None)
    parser.add_argument(
        "--control-prob", "--c", dest="control_prob", type=float, default=None,
        help="Control-mode probability",
    )
    # Spelling is normalized by ProtocolConfig, so both - and _ are accepted
    parser.add_argument(
        "--eve",
        dest="eve_strategy",
        default=None,
        metavar="{" + ",".join(s.value.replace("_", "-") for s in EveStrategy) + "}",
        help="Eavesdropping strategy",
    )
    parser.add_argument("--eve-basis", type=int, default=None, help="Ancilla basis of the controlled shift")
    parser.add_argument(
        "--independent-backward-basis",
        action="store_true",
        default=None,
        help="Intercept-resend measures the backward path in a fresh basis",
    )
    parser.add_argument("--workers", type=int, default=None, help="Worker processes (0: automatic)")


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mubqkd",
        description="Mutually unbiased bases and two-way qudit QKD security analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_options(common, suppress=True)

    simulate = sub.add_parser("simulate", parents=[common], help="Run a protocol session")
    _protocol_options(simulate)
    simulate.add_argument("--records", help="NDJSON file receiving every round record")

    cmp = sub.add_parser("compare", parents=[common], help="Simulate and check against closed forms")
    _protocol_options(cmp)

    mub = sub.add_parser("mub-check", parents=[common], help="Certify the d+1 bases")
    _field_options(mub)
    mub.add_argument("--threshold", type=float, default=MUB_THRESHOLD)

    table = sub.add_parser("field-table", parents=[common], help="Field arithmetic tables")
    _field_options(table)
    table.add_argument(
        "--kind", choices=FIELD_TABLE_KINDS, default="both",
        help="both: addition then multiplication table",
    )
    table.add_argument("--long", action="store_true", help="add/mul as a,b,result rows instead of d x d matrices")

    fig2 = sub.add_parser("fig2", parents=[common], help="Detection probability against d")
    fig2.add_argument("--d-list", type=int, nargs="+", default=None)

    fig3 = sub.add_parser("fig3", parents=[common], help="QDC success against information")
    fig3.add_argument("--c", type=float, default=0.5)
    fig3.add_argument("--d-list", type=int, nargs="+", default=None)
    fig3.add_argument("--max-bits", type=float, default=20.0)
    fig3.add_argument("--step", type=float, default=1.0)

    qdc = sub.add_parser("qdc-mc", parents=[common], help="Event-level QDC Monte Carlo")
    qdc.add_argument("--c", type=float, default=0.5)
    group = qdc.add_mutually_exclusive_group()
    group.add_argument("--d", type=int, default=None, help="Take P_E from the closed form for d")
    group.add_argument("--p-e", type=float, default=None, help="Detection probability per control run")
    qdc.add_argument("--n-messages", type=int, default=1)
    qdc.add_argument("--trials", type=int, default=100_000)

    return parser


def _protocol_config(args: argparse.Namespace) -> ProtocolConfig:
    return load_config(
        args.config,
        p=args.p,
        m=args.m,
        rounds=args.rounds,
        control_prob=args.control_prob,
        eve_strategy=args.eve_strategy,
        eve_basis=args.eve_basis,
        independent_backward_basis=args.independent_backward_basis,
        workers=args.workers,
        seed=args.seed,
    )


def _field_params(args: argparse.Namespace) -> tuple:
    """--p/--m, falling back to the config file and then to GF(3)."""
    cfg = load_config(args.config, p=args.p, m=args.m)
    return cfg.p, cfg.m


def flatten(data: Dict[str, Any]) -> Dict[str, Any]:
    """One CSV row from a nested report: nested mappings become prefixed columns."""
    row: Dict[str, Any] = {}
    for key, value in data.items():
        if isinstance(value, dict):
            for inner, v in flatten(value).items():
                row[f"{key}.{inner}"] = v
        elif isinstance(value, list):
            row[key] = "; ".join(str(v) for v in value)
        else:
            row[key] = value
    return row


def _write(text: str, args: argparse.Namespace) -> None:
    if args.out:
        write_text(text, args.out)
    else:
        sys.stdout.write(text)


def _emit(data: Any, args: argparse.Namespace, columns: Optional[List[str]] = None) -> None:
    if args.format == "csv" and isinstance(data, dict):
        data = flatten(data)
    _write(render(data, args.format, columns), args)


def _field_tables(args: argparse.Namespace) -> None:
    """
    CSV: one block per table, separated by a blank line. Add and mul default
    to d x d matrices with index headers. JSON/YAML: one mapping keyed by kind.
    """
    p, m = _field_params(args)
    spec = make_field(p, m)
    kinds = tuple(OPERATION_SYMBOLS) if args.kind == "both" else (args.kind,)
    blocks: List[str] = []
    data: Dict[str, Any] = {"field": str(spec), "irreducible": format_polynomial(spec.irreducible)}
    for kind in kinds:
        if kind in OPERATION_SYMBOLS and not args.long:
            columns, rows = operation_matrix(spec, kind)
            blocks.append(render(rows, "csv", columns))
            data[kind] = [[row[c] for c in columns[1:]] for row in rows]
        else:
            rows = field_table_rows(spec, kind)
            blocks.append(render(rows, "csv"))
            data[kind] = rows
    if args.format == "csv":
        _write("\n".join(blocks), args)
    else:
        _write(render(data, args.format), args)


def _run(args: argparse.Namespace) -> int:
    command = args.command

    if command == "simulate":
        cfg = _protocol_config(args)
        result = run_session(cfg, records_path=args.records)
        _emit({"config": cfg.model_dump(mode="json"), "stats": result.stats.to_dict()}, args)
        return EXIT_OK

    if command == "compare":
        report = compare(_protocol_config(args))
        _emit(report.to_dict(), args)
        if not report.passed:
            logger.error("3-sigma gate failed: %s", {k: v for k, v in report.checks.items() if not v})
            return EXIT_GATE_FAILED
        return EXIT_OK

    if command == "mub-check":
        p, m = _field_params(args)
        result = mub_check(build_mub(make_field(p, m)), args.threshold)
        _emit(result, args)
        return EXIT_OK if result["passed"] else EXIT_GATE_FAILED

    if command == "field-table":
        _field_tables(args)
        return EXIT_OK

    if command == "fig2":
        _emit(fig2_table(args.d_list), args, FIG2_COLUMNS)
        return EXIT_OK

    if command == "fig3":
        points = fig3_table(args.c, args.d_list, args.max_bits, args.step)
        _emit([point.to_dict() for point in points], args, FIG3_COLUMNS)
        return EXIT_OK

    if command == "qdc-mc":
        p_e = args.p_e if args.p_e is not None else detection_probability_closed(args.d or 3)
        result = qdc_success_monte_carlo(args.c, p_e, args.n_messages, args.trials, args.seed or 0)
        _emit(result, args)
        return EXIT_OK if result["passed"] else EXIT_GATE_FAILED

    raise AssertionError(f"unhandled command {command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the ``mubqkd`` console script."""
    parser = create_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr)

    try:
        return _run(args)
    except MubQkdError as e:
        print(f"error: {e.describe()}", file=sys.stderr)
        if e.context:
            logger.debug("Error context: %s", e.context)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
