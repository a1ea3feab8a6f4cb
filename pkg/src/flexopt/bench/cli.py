"""``flexopt-bench``: reproduce the benchmark experiments at desk scale.

Exit codes: 0 success, 1 usage error, 2 run failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile

import numpy as np

from .experiments import (
    CURVE_COLUMNS,
    CURVE_OPTIMIZERS,
    DEFAULT_SEED,
    BenchConfig,
    RunFailure,
    run_curves,
    run_linreg_lbfgs,
    run_rosenbrock_sa,
)

COMMANDS = {
    "rosenbrock-sa": ("rosenbrock", ("simulated-annealing",)),
    "linreg-lbfgs": ("linear-regression", ("lbfgs",)),
    "curves": ("linear-regression", tuple(CURVE_OPTIMIZERS)),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"seed for all randomness (default {DEFAULT_SEED})")
    common.add_argument("--n", type=_positive_int, default=1000, help="samples (regression)")
    common.add_argument("--d", type=_positive_int, default=100, help="dimensions (regression)")
    common.add_argument("--noise", type=float, default=1.0, help="label noise scale")
    common.add_argument("--epochs", type=_positive_int, default=5, help="epochs (curves)")
    common.add_argument("--step-size", type=float, default=None,
                        help="override every optimizer's default step size")
    common.add_argument("--batch-size", type=_positive_int, default=32)
    common.add_argument("--output", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "tsv"), default="csv")

    parser = _Parser(
        prog="flexopt-bench",
        description="Desk-scale reproductions of the optimization benchmarks.",
        epilog="Set FLEXOPT_DISABLE_TYPE_CHECKS=1 to turn element-type errors into warnings.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.add_parser("rosenbrock-sa", parents=[common],
                   help="100K-iteration simulated annealing on Rosenbrock")
    sub.add_parser("linreg-lbfgs", parents=[common],
                   help="L-BFGS on least squares: combined vs separate objective/gradient")
    curves = sub.add_parser("curves", parents=[common],
                            help="per-epoch learning curves of six SGD-family optimizers")
    curves.add_argument("--optimizers", default=",".join(CURVE_OPTIMIZERS),
                        help="comma-separated subset of: " + ", ".join(CURVE_OPTIMIZERS))
    return parser


def parse_cli(args) -> BenchConfig:
    """Parse ``args`` into a :class:`BenchConfig`; raises :class:`UsageError`."""
    parser = _build_parser()
    ns = parser.parse_args(args)
    if ns.command is None:
        parser.print_usage(sys.stderr)
        raise UsageError("flexopt-bench: error: a command is required")
    problem, optimizers = COMMANDS[ns.command]
    if ns.command == "curves":
        optimizers = tuple(name.strip() for name in ns.optimizers.split(",") if name.strip())
        unknown = [name for name in optimizers if name not in CURVE_OPTIMIZERS]
        if unknown or not optimizers:
            parser.print_usage(sys.stderr)
            raise UsageError(f"flexopt-bench: error: unknown optimizer(s): {', '.join(unknown) or '(none given)'}")
    return BenchConfig(
        command=ns.command, problem=problem, optimizers=optimizers, seed=ns.seed,
        n=ns.n, d=ns.d, noise=ns.noise, epochs=ns.epochs, step_size=ns.step_size,
        batch_size=ns.batch_size, output=ns.output, format=ns.format,
    )


def format_table(columns, rows, fmt="csv", comments=()) -> str:
    buffer = io.StringIO()
    for line in comments:
        buffer.write(f"# {line}\n")
    writer = csv.writer(buffer, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".flexopt-bench-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def execute(config: BenchConfig) -> str:
    """Run the configured experiment and return the formatted table."""
    if config.command == "rosenbrock-sa":
        _, row = run_rosenbrock_sa(config)
        return format_table(list(row), [list(row.values())], config.format)
    if config.command == "linreg-lbfgs":
        rows = []
        traces = {}
        for variant in ("combined", "separate"):
            _, row, trace = run_linreg_lbfgs(config, variant)
            rows.append(row)
            traces[variant] = trace.iterates
        identical = len(traces["combined"]) == len(traces["separate"]) and all(
            np.array_equal(a, b) for a, b in zip(traces["combined"], traces["separate"])
        )
        comments = [
            f"n={config.n} d={config.d} noise={config.noise!r} seed={config.seed} "
            f"iterations={config.iterations}",
            f"identical_iterates={str(identical).lower()}",
        ]
        return format_table(list(rows[0]), [list(r.values()) for r in rows], config.format, comments)
    result = run_curves(config)
    return format_table(CURVE_COLUMNS, [r.values() for r in result.rows], config.format, result.comments)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_cli(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        text = execute(config)
        _write(text, config.output)
    except (RunFailure, OSError) as exc:
        print(f"flexopt-bench: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
