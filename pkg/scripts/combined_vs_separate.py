"""L-BFGS on least squares with a combined versus separate objective/gradient.

Counts residual computations per objective+gradient request for both
variants and reports wall time; the counts, not the times, are the point.
"""
import argparse

from flexopt.bench.experiments import BenchConfig, run_linreg_lbfgs


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--d", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats per variant")
    args = parser.parse_args()

    config = BenchConfig("linreg-lbfgs", "linear-regression", ("lbfgs",), seed=args.seed, n=args.n, d=args.d)
    print("variant,requests,residual_computations,residuals_per_request,final_objective,best_seconds")
    for variant in ("combined", "separate"):
        times = []
        for _ in range(args.repeats):
            _, row, _ = run_linreg_lbfgs(config, variant)
            times.append(float(row["elapsed_seconds"]))
        print(f"{variant},{row['requests']},{row['residual_computations']},"
              f"{row['residuals_per_request']},{row['final_objective']},{min(times)!r}")


if __name__ == "__main__":
    main()
