"""Simulated annealing on Rosenbrock across several seeds.

Each run uses 100K iterations with the benchmark constructor values and
reports the best objective found; the final line summarises how many seeds
got below the threshold.
"""
import argparse

from flexopt.bench.experiments import BenchConfig, run_rosenbrock_sa


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=10, help="number of seeds, starting at 0")
    parser.add_argument("--threshold", type=float, default=0.1)
    args = parser.parse_args()

    hits = 0
    print("seed,evaluations,best_objective,x1,x2,elapsed_seconds")
    for seed in range(args.seeds):
        report, row = run_rosenbrock_sa(BenchConfig("rosenbrock-sa", "rosenbrock", ("sa",), seed=seed))
        hits += report.final_objective < args.threshold
        print(",".join(str(row[k]) for k in ("seed", "evaluations", "best_objective", "x1", "x2",
                                               "elapsed_seconds")))
    print(f"# {hits}/{args.seeds} seeds reached objective < {args.threshold}")


if __name__ == "__main__":
    main()
