from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..function import FunctionClass
from ..numerics import ElementTypeRequirement, require
from .base import Optimizer, Termination


@dataclass
class ExponentialSchedule:
    """``T_{k+1} = (1 - decay) * T_k``."""

    decay: float = 0.001

    def __post_init__(self):
        if not 0 < self.decay < 1:
            raise ValueError("decay must lie in (0, 1)")

    def next_temperature(self, temperature: float) -> float:
        return (1.0 - self.decay) * temperature


def metropolis_accept(delta: float, temperature: float, u: float) -> bool:
    """Accept a move changing the objective by ``delta`` given uniform draw ``u``."""
    if delta <= 0:
        return True
    return u < math.exp(-delta / temperature)


@dataclass
class SimulatedAnnealing(Optimizer):
    """Simulated annealing with adaptive per-coordinate Gaussian moves.

    Each iteration perturbs one coordinate (cycling through them) and costs
    exactly one objective evaluation; the evaluation of the starting point
    counts as the first iteration.  Every ``moves_per_sweep`` proposals each
    coordinate's move scale is multiplied by
    ``exp(move_gain * (acceptance_rate - target_acceptance))``, clamped to
    ``scale_clamp``.  Cooling starts after
    ``init_moves`` proposals.  With ``tolerance > 0`` the run stops once the
    current objective moves by less than ``tolerance`` over
    ``max_tolerance_sweeps`` consecutive sweeps.
    """

    schedule: ExponentialSchedule = field(default_factory=ExponentialSchedule)
    max_iterations: int = 1000000
    initial_temperature: float = 10000.0
    init_moves: int = 1000
    moves_per_sweep: int = 100
    tolerance: float = 1e-5
    max_tolerance_sweeps: int = 3
    initial_move_scale: float = 0.3
    target_acceptance: float = 0.44
    move_gain: float = 0.3
    scale_clamp: tuple[float, float] = (0.5, 2.0)
    seed: int = 0

    requirement = FunctionClass.ARBITRARY

    def check(self, function, x):
        super().check(function, x)
        require(ElementTypeRequirement.FLOATING_POINT, x)
        if self.initial_temperature <= 0:
            raise ValueError("initial_temperature must be positive")
        if self.max_iterations < 1 or self.moves_per_sweep < 1:
            raise ValueError("max_iterations and moves_per_sweep must be at least 1")

    def _run(self, run, x):
        rng = np.random.default_rng(self.seed)
        dtype = x.dtype
        x = x.copy()
        flat = x.reshape(-1)
        dim = flat.size
        scales = np.full(dim, self.initial_move_scale, dtype=np.float64)
        accepted = np.zeros(dim, dtype=np.int64)
        proposed = np.zeros(dim, dtype=np.int64)

        objective = run.evaluate(x)
        run.iterations = 1
        best_x, best = x.copy(), objective
        run.accept(best_x, best)
        run.history.append(best)

        temperature = self.initial_temperature
        sweep_start = objective
        quiet_sweeps = 0
        low, high = self.scale_clamp
        moves = 0
        while run.iterations < self.max_iterations:
            j = moves % dim
            old = flat[j]
            flat[j] = old + dtype.type(scales[j] * rng.standard_normal())
            candidate = run.evaluate(x)
            run.iterations += 1
            moves += 1
            proposed[j] += 1
            if metropolis_accept(float(candidate - objective), temperature, rng.random()):
                objective = candidate
                accepted[j] += 1
                if objective < best:
                    best_x, best = x.copy(), objective
                    run.accept(best_x, best)
                run.fire("step_taken", x)
            else:
                flat[j] = old
            run.history.append(best)

            if moves > self.init_moves:
                temperature = self.schedule.next_temperature(temperature)

            if moves % self.moves_per_sweep == 0:
                tried = proposed > 0
                rate = np.where(tried, accepted / np.maximum(proposed, 1), self.target_acceptance)
                factor = np.exp(self.move_gain * (rate - self.target_acceptance))
                scales *= np.clip(factor, low, high)
                accepted[:] = 0
                proposed[:] = 0
                if self.tolerance > 0:
                    if abs(objective - sweep_start) < self.tolerance:
                        quiet_sweeps += 1
                        if quiet_sweeps >= self.max_tolerance_sweeps:
                            return Termination.CONVERGED
                    else:
                        quiet_sweeps = 0
                    sweep_start = objective
        run.info["final_temperature"] = temperature
        return Termination.MAX_ITERATIONS


def simulated_annealing(function, x0, schedule=None, max_iterations=1000000,
                        initial_temperature=10000.0, init_moves=1000, moves_per_sweep=100,
                        tolerance=1e-5, seed=0, callbacks=()):
    optimizer = SimulatedAnnealing(
        schedule if schedule is not None else ExponentialSchedule(),
        max_iterations, initial_temperature, init_moves, moves_per_sweep, tolerance, seed=seed,
    )
    return optimizer.optimize(function, x0, callbacks)
