"""Desk-scale experiment runners behind ``flexopt-bench``."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..function import FullFunction, expose
from ..optimizers import (
    LBFGS,
    SMORMS3,
    AdaGrad,
    Adam,
    ExponentialSchedule,
    MomentumSGD,
    RMSProp,
    SimulatedAnnealing,
    StandardSGD,
    Termination,
)
from ..problems import LinearRegression, Rosenbrock, synthetic_regression

DEFAULT_SEED = 42

# name -> factory(step_size or None, batch_size, max_iterations, seed)
CURVE_OPTIMIZERS = {
    "sgd": StandardSGD,
    "adam": Adam,
    "adagrad": AdaGrad,
    "smorms3": SMORMS3,
    "momentum-sgd": MomentumSGD,
    "rmsprop": RMSProp,
}

CURVE_COLUMNS = ("problem", "optimizer", "epoch", "evaluations", "objective", "elapsed_seconds")


class RunFailure(RuntimeError):
    """An experiment ended in a state that should make the CLI exit with code 2."""


@dataclass
class BenchConfig:
    command: str
    problem: str
    optimizers: tuple[str, ...]
    seed: int = DEFAULT_SEED
    n: int = 1000
    d: int = 100
    noise: float = 1.0
    epochs: int = 5
    step_size: float | None = None
    batch_size: int = 32
    iterations: int = 10
    output: str | None = None
    format: str = "csv"


@dataclass
class CurveRow:
    problem: str
    optimizer: str
    epoch: int
    evaluations: int
    objective: float
    elapsed_seconds: float

    def values(self):
        return [self.problem, self.optimizer, self.epoch, self.evaluations,
                repr(float(self.objective)), repr(float(self.elapsed_seconds))]


@dataclass
class CurveResult:
    rows: list[CurveRow]
    initial_objective: float
    comments: list[str] = field(default_factory=list)


def run_rosenbrock_sa(config: BenchConfig, max_iterations: int = 100000):
    """Simulated annealing on Rosenbrock with constructor values (100000, 10000, 1000, 100, 0.0)."""
    problem = Rosenbrock()
    optimizer = SimulatedAnnealing(
        ExponentialSchedule(), max_iterations, 10000.0, 1000, 100, 0.0, seed=config.seed
    )
    function = FullFunction(problem)
    report = optimizer.optimize(function, problem.get_initial_point())
    if report.termination is Termination.NUMERICAL_FAILURE:
        raise RunFailure("simulated annealing hit a non-finite objective")
    row = {
        "problem": "rosenbrock",
        "optimizer": "simulated-annealing",
        "seed": config.seed,
        "evaluations": function.evaluations,
        "best_objective": repr(float(report.final_objective)),
        "x1": repr(float(report.best_coordinates[0])),
        "x2": repr(float(report.best_coordinates[1])),
        "elapsed_seconds": repr(report.elapsed_seconds),
    }
    return report, row


class _Trace:
    def __init__(self):
        self.iterates = []

    def step_taken(self, optimizer, function, coordinates):
        self.iterates.append(np.array(coordinates, copy=True))


def run_linreg_lbfgs(config: BenchConfig, variant: str):
    """L-BFGS on least squares with either one combined method or separate ones.

    Returns ``(report, row, trace)``; ``trace`` holds the accepted iterates.
    """
    if variant not in ("combined", "separate"):
        raise ValueError(f"unknown variant {variant!r}")
    X, y = synthetic_regression(config.n, config.d, config.noise, config.seed)
    problem = LinearRegression(X, y)
    if variant == "combined":
        user = expose(problem, "evaluate_with_gradient")
    else:
        user = expose(problem, "evaluate", "gradient")
    function = FullFunction(user)
    trace = _Trace()
    optimizer = LBFGS(max_iterations=config.iterations, gradient_tolerance=0.0)
    report = optimizer.optimize(function, problem.get_initial_point(), [trace])
    if report.termination is Termination.NUMERICAL_FAILURE:
        raise RunFailure(f"L-BFGS ({variant}) hit a non-finite objective")
    # every L-BFGS request goes through evaluate_with_gradient
    requests = function.combined if variant == "combined" else function.evaluations
    row = {
        "variant": variant,
        "n": config.n,
        "d": config.d,
        "iterations": report.iterations,
        "requests": requests,
        "residual_computations": problem.residual_computations,
        "residuals_per_request": repr(problem.residual_computations / requests),
        "final_objective": repr(float(report.final_objective)),
        "elapsed_seconds": repr(report.elapsed_seconds),
    }
    return report, row, trace


class _EpochRecorder:
    def __init__(self, name, X, y, clock_start):
        self.name = name
        self.X, self.y = X, y
        self.start = clock_start
        self.rows: list[CurveRow] = []

    def end_epoch(self, optimizer, function, coordinates, epoch, objective):
        r = self.X @ coordinates - self.y
        self.rows.append(CurveRow(
            "linear-regression", self.name, epoch,
            function.evaluations + function.combined,
            float(r @ r), time.perf_counter() - self.start,
        ))


def run_curves(config: BenchConfig) -> CurveResult:
    """Train each configured separable optimizer for ``config.epochs`` epochs."""
    X, y = synthetic_regression(config.n, config.d, config.noise, config.seed)
    theta0 = np.zeros(config.d)
    initial = float(y @ y)
    per_epoch = math.ceil(config.n / config.batch_size)
    rows = []
    for name in config.optimizers:
        kwargs = dict(batch_size=config.batch_size, max_iterations=config.epochs * per_epoch,
                      tolerance=0.0, seed=config.seed)
        if config.step_size is not None:
            kwargs["step_size"] = config.step_size
        optimizer = CURVE_OPTIMIZERS[name](**kwargs)
        recorder = _EpochRecorder(name, X, y, time.perf_counter())
        report = optimizer.optimize(LinearRegression(X, y), theta0, [recorder])
        if report.termination is Termination.NUMERICAL_FAILURE:
            raise RunFailure(f"{name} hit a non-finite objective")
        rows.extend(recorder.rows)
    comments = [
        f"problem=linear-regression n={config.n} d={config.d} noise={config.noise!r} "
        f"seed={config.seed} epochs={config.epochs} batch_size={config.batch_size}",
        "momentum-sgd stands in for SPALeRA SGD, which is not implemented",
        f"initial_objective={initial!r}",
    ]
    return CurveResult(rows, initial, comments)
