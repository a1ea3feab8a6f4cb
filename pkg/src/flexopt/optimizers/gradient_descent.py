from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..function import FunctionClass
from ..numerics import ElementTypeRequirement, require
from .base import Optimizer, Termination


@dataclass
class GradientDescent(Optimizer):
    """Fixed-step gradient descent: ``x <- x - step_size * grad f(x)``.

    Stops when the max-norm of the gradient drops below ``tolerance``.
    """

    step_size: float = 0.01
    max_iterations: int = 100000
    tolerance: float = 1e-5

    requirement = FunctionClass.DIFFERENTIABLE

    def check(self, function, x):
        super().check(function, x)
        require(ElementTypeRequirement.FLOATING_POINT, x)
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")

    def _run(self, run, x):
        objective, gradient = run.evaluate_with_gradient(x)
        run.accept(x, objective)
        run.history.append(objective)
        while True:
            if np.max(np.abs(gradient)) < self.tolerance:
                return Termination.CONVERGED
            if run.iterations >= self.max_iterations:
                return Termination.MAX_ITERATIONS
            x = x - self.step_size * gradient
            run.iterations += 1
            run.fire("step_taken", x)
            objective, gradient = run.evaluate_with_gradient(x)
            run.accept(x, objective)
            run.history.append(objective)


def gradient_descent(function, x0, step_size=0.01, max_iterations=100000, tolerance=1e-5, callbacks=()):
    return GradientDescent(step_size, max_iterations, tolerance).optimize(function, x0, callbacks)
