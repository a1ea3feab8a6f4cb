from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..function import FunctionClass
from ..numerics import ElementTypeRequirement, require
from .base import NumericalFailure, Optimizer, Termination, finite


class Selection(enum.Enum):
    CYCLIC = "cyclic"
    RANDOM_PERMUTATION = "random_permutation"


@dataclass
class CoordinateDescent(Optimizer):
    """Stochastic coordinate descent on partially differentiable functions.

    Each iteration asks for the partial gradient along one feature and moves
    only the coordinates it touches (its non-zero entries).  A sweep is
    ``num_features()`` iterations; after each sweep the full objective is
    evaluated and the run converges once it improves by less than
    ``tolerance``.
    """

    step_size: float = 0.01
    max_iterations: int = 100000
    tolerance: float = 1e-5
    selection: Selection = Selection.CYCLIC
    seed: int = 0

    requirement = FunctionClass.PARTIALLY_DIFFERENTIABLE

    def check(self, function, x):
        super().check(function, x)
        require(ElementTypeRequirement.FLOATING_POINT, x)

    def _run(self, run, x):
        f = run.function
        features = f.num_features()
        rng = np.random.default_rng(self.seed)
        selection = Selection(self.selection)
        x = x.copy()
        objective = run.evaluate(x)
        run.accept(x.copy(), objective)
        run.history.append(objective)
        while True:
            if selection is Selection.CYCLIC:
                order = range(features)
            else:
                order = rng.permutation(features)
            for j in order:
                if run.iterations >= self.max_iterations:
                    break
                g = np.asarray(f.partial_gradient(x, int(j)))
                require(ElementTypeRequirement.SAME_INTERNAL_TYPES, x, g)
                if not finite(g):
                    raise NumericalFailure
                run.fire("gradient", x, g)
                touched = np.flatnonzero(g)
                flat = x.reshape(-1)
                flat[touched] -= self.step_size * g.reshape(-1)[touched]
                run.iterations += 1
                run.fire("step_taken", x)
            else:
                new_objective = run.evaluate(x)
                run.accept(x.copy(), new_objective)
                run.history.append(new_objective)
                improvement = objective - new_objective
                objective = new_objective
                if abs(improvement) < self.tolerance:
                    return Termination.CONVERGED
                continue
            new_objective = run.evaluate(x)
            run.accept(x.copy(), new_objective)
            run.history.append(new_objective)
            return Termination.MAX_ITERATIONS


def coordinate_descent(function, x0, step_size=0.01, max_iterations=100000, tolerance=1e-5,
                       selection=Selection.CYCLIC, seed=0, callbacks=()):
    optimizer = CoordinateDescent(step_size, max_iterations, tolerance, selection, seed)
    return optimizer.optimize(function, x0, callbacks)
