from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..callbacks import dispatch
from ..function import CapabilityError, FullFunction, FunctionClass, wrap_full_function
from ..numerics import ElementTypeRequirement, require


class Termination(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    CALLBACK_REQUESTED = "callback_requested"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class OptimizationReport:
    best_coordinates: np.ndarray
    final_objective: float
    iterations: int
    termination: Termination
    evaluations: int = 0
    gradients: int = 0
    combined: int = 0
    epochs: int = 0
    elapsed_seconds: float = 0.0
    line_search_failed: bool = False
    objective_history: list = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.termination is Termination.CONVERGED and not self.line_search_failed


class Terminated(Exception):
    """Internal signal: a callback asked to stop."""


class NumericalFailure(Exception):
    """Internal signal: a non-finite objective or gradient was produced."""


def finite(value) -> bool:
    return bool(np.all(np.isfinite(value)))


class Optimizer:
    """Shared plumbing for all optimizers.

    Subclasses implement ``_run(run, x)``: iterate, record accepted iterates
    with ``run.accept`` and return the :class:`Termination` reason.  Callback
    terminate requests and non-finite values unwind through exceptions.
    """

    requirement: FunctionClass = FunctionClass.ARBITRARY
    emits_epochs = False

    @property
    def step_size(self):
        raise CapabilityError(
            f"{type(self).__name__} has no step size; callbacks that change the "
            f"step size can only be used with optimizers that have one."
        )

    @step_size.setter
    def step_size(self, value):
        raise CapabilityError(f"{type(self).__name__} has no step size to set.")

    def check(self, function: FullFunction, x: np.ndarray) -> None:
        function.require(self.requirement)

    def optimize(self, function, coordinates, callbacks=()) -> OptimizationReport:
        f = wrap_full_function(function)
        x = np.array(coordinates, copy=True)
        self.check(f, x)
        callbacks = tuple(callbacks)
        run = Run(self, f, callbacks)
        start = time.perf_counter()
        counts = (f.evaluations, f.gradients, f.combined)
        report = run.execute(x)
        report.elapsed_seconds = time.perf_counter() - start
        report.evaluations = f.evaluations - counts[0]
        report.gradients = f.gradients - counts[1]
        report.combined = f.combined - counts[2]
        return report


class Run:
    """State shared between an optimizer and its callbacks during one call."""

    def __init__(self, optimizer: Optimizer, function: FullFunction, callbacks):
        self.optimizer = optimizer
        self.function = function
        self.callbacks = callbacks
        self.history: list = []
        self.info: dict[str, Any] = {}
        self.epochs = 0
        self.line_search_failed = False
        # last accepted iterate; reported if the run is cut short
        self.best_x = None
        self.best_objective = math.nan
        self.iterations = 0

    def fire(self, event: str, x, *args) -> None:
        if not self.callbacks:
            return
        if dispatch(event, self.callbacks, self.optimizer, self.function, x, *args):
            raise Terminated

    def evaluate(self, x):
        objective = self.function.evaluate(x)
        if not finite(objective):
            raise NumericalFailure
        self.fire("evaluate", x, objective)
        return objective

    def evaluate_with_gradient(self, x):
        objective, gradient = self.function.evaluate_with_gradient(x)
        gradient = np.asarray(gradient)
        require(ElementTypeRequirement.SAME_INTERNAL_TYPES, x, gradient)
        if gradient.shape != x.shape:
            raise ValueError(
                f"gradient shape {gradient.shape} does not match coordinates {x.shape}"
            )
        if not (finite(objective) and finite(gradient)):
            raise NumericalFailure
        self.fire("evaluate", x, objective)
        self.fire("gradient", x, gradient)
        return objective, gradient

    def accept(self, x, objective) -> None:
        self.best_x = x
        self.best_objective = objective

    def execute(self, x) -> OptimizationReport:
        termination = None
        try:
            self.fire("begin_optimization", x)
            termination = self.optimizer._run(self, x)
        except Terminated:
            termination = Termination.CALLBACK_REQUESTED
        except NumericalFailure:
            termination = Termination.NUMERICAL_FAILURE
        x_final = self.best_x if self.best_x is not None else x
        if self.callbacks:
            # runs even after a terminate request so reporters can close cleanly;
            # its own decision is moot
            dispatch("end_optimization", self.callbacks, self.optimizer, self.function, x_final)
        return OptimizationReport(
            best_coordinates=x_final,
            final_objective=self.best_objective,
            iterations=self.iterations,
            termination=termination,
            epochs=self.epochs,
            line_search_failed=self.line_search_failed,
            objective_history=self.history,
            info=self.info,
        )
