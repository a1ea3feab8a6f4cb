from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..function import FunctionClass
from ..numerics import ElementTypeRequirement, require
from .base import NumericalFailure, Optimizer, Terminated, Termination, finite
from .lbfgs import LBFGS


def augmented_lagrangian_value(objective, constraints, multipliers, penalty):
    """``f + sum(lambda_i c_i) + penalty/2 * sum(c_i^2)``."""
    c = np.asarray(constraints, dtype=np.float64)
    lam = np.asarray(multipliers, dtype=np.float64)
    return objective + float(np.dot(lam, c)) + 0.5 * penalty * float(np.dot(c, c))


def update_multipliers(multipliers, constraints, penalty):
    """First-order multiplier update ``lambda_i <- lambda_i + penalty * c_i``."""
    return np.asarray(multipliers, dtype=np.float64) + penalty * np.asarray(constraints, dtype=np.float64)


class _AugmentedObjective:
    """Inner objective seen by L-BFGS; relays every user call to the outer callbacks."""

    def __init__(self, run, multipliers, penalty):
        self.run = run
        self.multipliers = multipliers
        self.penalty = penalty

    def evaluate_with_gradient(self, x):
        run, f = self.run, self.run.function
        objective, gradient = f.evaluate_with_gradient(x)
        gradient = np.array(gradient, copy=True)
        if not (finite(objective) and finite(gradient)):
            return objective, gradient
        run.fire("evaluate", x, objective)
        run.fire("gradient", x, gradient)
        value = objective
        for i, lam in enumerate(self.multipliers):
            c = f.evaluate_constraint(i, x)
            run.fire("evaluate_constraint", x, i, c)
            gc = np.asarray(f.gradient_constraint(i, x))
            run.fire("gradient_constraint", x, i, gc)
            value = value + lam * c + 0.5 * self.penalty * c * c
            gradient += (lam + self.penalty * c) * gc
        return value, gradient


class _StepRelay:
    def __init__(self, run):
        self.run = run

    def step_taken(self, optimizer, function, coordinates):
        self.run.fire("step_taken", coordinates)


@dataclass
class AugmentedLagrangian(Optimizer):
    """Augmented Lagrangian method for equality constraints ``c_i(x) = 0``.

    Each outer iteration minimises the augmented Lagrangian with ``inner``,
    then updates the multipliers.  The penalty is multiplied by
    ``penalty_growth`` whenever the worst constraint violation fails to shrink
    to ``required_reduction`` times its previous value.
    """

    inner: LBFGS = field(default_factory=lambda: LBFGS(gradient_tolerance=1e-9, max_iterations=1000))
    max_outer: int = 50
    constraint_tolerance: float = 1e-7
    initial_penalty: float = 10.0
    penalty_growth: float = 10.0
    required_reduction: float = 0.25

    requirement = FunctionClass.CONSTRAINED

    def check(self, function, x):
        super().check(function, x)
        require(ElementTypeRequirement.FLOATING_POINT, x)

    def _constraints(self, run, x):
        f = run.function
        values = []
        for i in range(f.num_constraints()):
            c = f.evaluate_constraint(i, x)
            if not finite(c):
                raise NumericalFailure
            run.fire("evaluate_constraint", x, i, c)
            values.append(float(c))
        return np.asarray(values)

    def _run(self, run, x):
        f = run.function
        m = f.num_constraints()
        multipliers = np.zeros(m)
        penalty = self.initial_penalty
        previous = math.inf
        violations = []
        run.info["constraint_violation_history"] = violations
        relay = _StepRelay(run)
        for _ in range(self.max_outer):
            inner = _AugmentedObjective(run, multipliers, penalty)
            report = self.inner.optimize(inner, x, callbacks=(relay,) if run.callbacks else ())
            if report.termination is Termination.CALLBACK_REQUESTED:
                raise Terminated
            if report.termination is Termination.NUMERICAL_FAILURE:
                raise NumericalFailure
            x = report.best_coordinates
            c = self._constraints(run, x)
            violation = float(np.max(np.abs(c))) if m else 0.0
            violations.append(violation)
            objective = run.evaluate(x)
            run.accept(x, objective)
            run.history.append(objective)
            run.iterations += 1
            run.info.update(multipliers=multipliers.copy(), penalty=penalty,
                            inner_termination=report.termination)
            if violation < self.constraint_tolerance and report.termination is Termination.CONVERGED:
                return Termination.CONVERGED
            multipliers = update_multipliers(multipliers, c, penalty)
            if violation > self.required_reduction * previous:
                penalty *= self.penalty_growth
            previous = violation
        return Termination.MAX_ITERATIONS


def augmented_lagrangian(function, x0, inner=None, max_outer=50, constraint_tolerance=1e-7, callbacks=()):
    optimizer = AugmentedLagrangian(
        inner if inner is not None else LBFGS(gradient_tolerance=1e-9, max_iterations=1000),
        max_outer, constraint_tolerance,
    )
    return optimizer.optimize(function, x0, callbacks)
