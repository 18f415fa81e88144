"""Command-line interface: ``replisure <command> [options]``.

Exit status is 0 on success, 2 for usage or input errors and 3 when a
numerical routine fails.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import reports
from .errors import IngestionError, ReplisureError
from .studies import BUNDLED, load_dataset

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

COMMANDS = ("assess", "power", "ci", "curves", "power-profile", "success-curve", "shrinkage", "verify-t1e")


class UsageError(Exception):
    pass


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value < 0.5:
        raise argparse.ArgumentTypeError(f"must lie in (0, 0.5), got {value}")
    return value


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _grid(text: str) -> list[float]:
    """``LO:HI:N`` for a log-spaced grid, or a comma-separated list."""
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return reports.log_grid(float(lo), float(hi), int(n))
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None
    if not values or any(not v > 0 for v in values):
        raise argparse.ArgumentTypeError(f"grid values must be positive: {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv", dest="output_format")
    common.add_argument("--out", metavar="PATH", dest="output_path", help="write here instead of stdout")
    common.add_argument(
        "--svg", nargs="?", const="", default=None, metavar="PATH",
        help="also render a figure (default: next to --out, or <command>.svg)",
    )

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", default=BUNDLED, metavar="PATH|bundled",
                      help="dataset CSV; 'bundled' honours $REPLISURE_DATA")
    data.add_argument("--exclude", action="append", default=[], metavar="LABEL",
                      help="drop a study by label (repeatable)")

    alpha = argparse.ArgumentParser(add_help=False)
    alpha.add_argument("--alpha", type=_probability, default=0.025, help="one-sided level (default 0.025)")

    parser = argparse.ArgumentParser(
        prog="replisure",
        description="Replication success of original/replication study pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("assess", parents=[common, data, alpha], help="per-pair p-values and success")
    p.add_argument("--method", choices=("controlled", "nominal", "both"), default="controlled")

    sub.add_parser("power", parents=[common, data, alpha], help="conditional and predictive power")

    p = sub.add_parser("ci", parents=[common, data], help="meta-analysis and sceptical CIs")
    p.add_argument("--alpha", type=_probability, default=0.025,
                   help="overall one-sided level of the sceptical interval (default 0.025)")

    p = sub.add_parser("curves", parents=[common], help="sceptical vs two-trials p over c")
    p.add_argument("--p-original", type=_probability, default=0.005)
    p.add_argument("--rel-effect", type=_positive, default=1.0)
    p.add_argument("--c-grid", type=_grid, default=None, metavar="LO:HI:N|LIST")

    p = sub.add_parser("power-profile", parents=[common, data, alpha], help="conditional power curve for one study")
    p.add_argument("label", help="study label, e.g. TRITON-TIMI")
    p.add_argument("--c", type=_positive, default=None, help="variance ratio (default: the study's own)")

    p = sub.add_parser("success-curve", parents=[common, data], help="success rate and power over alpha")
    p.add_argument("--alpha-grid", type=_grid, default=None, metavar="LO:HI:N|LIST")

    sub.add_parser("shrinkage", parents=[common, data], help="margin-shifted original vs replication estimates")

    p = sub.add_parser("verify-t1e", parents=[common], help="Monte Carlo check of Type-I error control")
    p.add_argument("--alpha", type=_probability, default=0.1)
    p.add_argument("--c", type=_grid, default=[0.5, 1.0, 2.0, 10.0], metavar="LIST",
                   help="variance ratios (default 0.5,1,2,10)")
    p.add_argument("--draws", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    return parser


def _dataset(args):
    data = load_dataset(args.input)
    if args.exclude:
        try:
            data = data.without(args.exclude)
        except KeyError as exc:
            raise UsageError(f"unknown label(s) in --exclude: {exc.args[0]}") from None
    return data


def build_table(args) -> reports.Table:
    cmd = args.command
    if cmd == "assess":
        return reports.assessment_table(_dataset(args), args.alpha, args.method)
    if cmd == "power":
        return reports.power_table(_dataset(args), args.alpha)
    if cmd == "ci":
        return reports.ci_table(_dataset(args), args.alpha)
    if cmd == "curves":
        return reports.curves_table(args.p_original, args.rel_effect, args.c_grid)
    if cmd == "power-profile":
        data = _dataset(args)
        try:
            pair = data[args.label]
        except KeyError:
            raise UsageError(f"unknown study label {args.label!r}; known: {', '.join(data.labels)}") from None
        return reports.power_profile(pair, args.c, args.alpha)
    if cmd == "success-curve":
        return reports.success_curve(_dataset(args), args.alpha_grid)
    if cmd == "shrinkage":
        return reports.shrinkage_table(_dataset(args))
    if cmd == "verify-t1e":
        if args.draws < 1:
            raise UsageError("--draws must be positive")
        return reports.calibration_table(args.c, args.alpha, args.draws, args.seed)
    raise UsageError(f"unknown command {cmd!r}")  # pragma: no cover


def _svg_path(args) -> Path:
    if args.svg:
        return Path(args.svg)
    if args.output_path:
        return Path(args.output_path).with_suffix(".svg")
    return Path(f"{args.command}.svg")


def emit(table: reports.Table, args) -> None:
    writer = reports.write_json if args.output_format == "json" else reports.write_csv
    if args.output_path:
        with open(args.output_path, "w", encoding="utf-8", newline="") as fh:
            writer(table, fh)
    else:
        writer(table, sys.stdout)
    if args.svg is not None:
        from .plotting import render

        path = render(table, _svg_path(args))
        print(f"figure written to {path}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        table = build_table(args)
        emit(table, args)
    except (UsageError, FileNotFoundError, IngestionError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"replisure {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"replisure {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ReplisureError as exc:
        print(f"replisure {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"replisure {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
