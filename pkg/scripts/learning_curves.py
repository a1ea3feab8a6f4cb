"""Per-epoch learning curves of six SGD-family optimizers on linear regression.

Writes the curves CSV (same schema as ``flexopt-bench curves``) and, if
matplotlib is installed and ``--plot`` is given, a PNG next to it.
"""
import argparse
import csv

from flexopt.bench.cli import format_table
from flexopt.bench.experiments import CURVE_COLUMNS, CURVE_OPTIMIZERS, BenchConfig, run_curves


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--d", type=int, default=100)
    parser.add_argument("--epochs", type=int, default=5)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--output", default="learning_curves.csv")
    parser.add_argument("--plot", action="store_true")
    args = parser.parse_args()

    config = BenchConfig("curves", "linear-regression", tuple(CURVE_OPTIMIZERS), seed=args.seed,
                         n=args.n, d=args.d, epochs=args.epochs)
    result = run_curves(config)
    with open(args.output, "w", newline="") as handle:
        handle.write(format_table(CURVE_COLUMNS, [r.values() for r in result.rows], "csv", result.comments))
    print(f"wrote {len(result.rows)} rows to {args.output}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        with open(args.output) as handle:
            rows = list(csv.DictReader(line for line in handle if not line.startswith("#")))
        fig, ax = plt.subplots()
        for name in CURVE_OPTIMIZERS:
            mine = [r for r in rows if r["optimizer"] == name]
            ax.plot([0] + [int(r["epoch"]) for r in mine],
                    [result.initial_objective] + [float(r["objective"]) for r in mine], label=name)
        ax.set_xlabel("epoch")
        ax.set_ylabel("objective")
        ax.set_yscale("log")
        ax.legend()
        fig.savefig(args.output.rsplit(".", 1)[0] + ".png", dpi=120)


if __name__ == "__main__":
    main()
