from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from ..function import FunctionClass
from ..numerics import ElementTypeRequirement, require
from .base import Optimizer, Termination


class LineSearchResult(NamedTuple):
    step: float
    objective: float
    slope: float
    payload: object
    trials: int


def _cubic_min(a, fa, da, b, fb, db):
    """Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), or None."""
    if a == b:
        return None
    d1 = da + db - 3.0 * (fa - fb) / (a - b)
    disc = d1 * d1 - da * db
    if disc < 0 or not math.isfinite(disc):
        return None
    d2 = math.copysign(math.sqrt(disc), b - a)
    denom = db - da + 2.0 * d2
    if denom == 0:
        return None
    t = b - (b - a) * (db + d2 - d1) / denom
    return t if math.isfinite(t) else None


def strong_wolfe_line_search(
    phi: Callable[[float], tuple[float, float, object]],
    f0: float,
    slope0: float,
    initial_step: float = 1.0,
    c1: float = 1e-4,
    c2: float = 0.9,
    max_trials: int = 50,
    max_step: float = 1e20,
) -> LineSearchResult | None:
    """Find a step satisfying the strong Wolfe conditions along a descent direction.

    ``phi(alpha)`` returns ``(objective, directional derivative, payload)`` at
    ``alpha``; the payload of the accepted trial is handed back untouched.
    Bracketing with step doubling, then zooming by safeguarded cubic
    interpolation.  Returns ``None`` if no acceptable step is found within
    ``max_trials`` evaluations.
    """
    if slope0 >= 0:
        raise ValueError("line search needs a descent direction (slope0 < 0)")
    trials = 0

    def sufficient(alpha, f):
        return f <= f0 + c1 * alpha * slope0

    def curvature(d):
        return abs(d) <= -c2 * slope0

    def zoom(lo, f_lo, d_lo, hi, f_hi, d_hi):
        nonlocal trials
        while trials < max_trials:
            width = hi - lo
            t = _cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi)
            low, high = sorted((lo + 0.1 * width, hi - 0.1 * width))
            if t is None or not (low <= t <= high):
                t = lo + 0.5 * width
            f_t, d_t, payload = phi(t)
            trials += 1
            if not sufficient(t, f_t) or f_t >= f_lo:
                hi, f_hi, d_hi = t, f_t, d_t
            else:
                if curvature(d_t):
                    return LineSearchResult(t, f_t, d_t, payload, trials)
                if d_t * (hi - lo) >= 0:
                    hi, f_hi, d_hi = lo, f_lo, d_lo
                lo, f_lo, d_lo = t, f_t, d_t
            if abs(hi - lo) <= 1e-16 * max(1.0, abs(lo)):
                break
        return None

    prev, f_prev, d_prev = 0.0, f0, slope0
    alpha = initial_step
    while trials < max_trials:
        f_a, d_a, payload = phi(alpha)
        trials += 1
        # non-finite trials fail sufficient decrease and are bisected away
        if not sufficient(alpha, f_a) or (trials > 1 and f_a >= f_prev):
            return zoom(prev, f_prev, d_prev, alpha, f_a, d_a)
        if curvature(d_a):
            return LineSearchResult(alpha, f_a, d_a, payload, trials)
        if d_a >= 0:
            return zoom(alpha, f_a, d_a, prev, f_prev, d_prev)
        prev, f_prev, d_prev = alpha, f_a, d_a
        alpha = min(2.0 * alpha, max_step)
    return None


def two_loop_direction(gradient: np.ndarray, memory) -> np.ndarray:
    """``-H g`` from stored ``(s, y, rho)`` pairs, oldest first.

    The initial inverse Hessian is ``gamma * I`` with ``gamma = s'y / y'y``
    from the newest pair (identity when the memory is empty).
    """
    q = gradient.copy()
    alphas = []
    for s, y, rho in reversed(memory):
        a = rho * np.vdot(s, q)
        alphas.append(a)
        q = q - a * y
    if memory:
        s, y, _ = memory[-1]
        q = q * (np.vdot(s, y) / np.vdot(y, y))
    for (s, y, rho), a in zip(memory, reversed(alphas)):
        b = rho * np.vdot(y, q)
        q = q + (a - b) * s
    return -q


@dataclass
class LBFGS(Optimizer):
    """Limited-memory BFGS with a strong Wolfe line search.

    The first iteration (and any iteration after a memory reset) searches
    along the normalised steepest-descent direction.
    """

    memory: int = 10
    max_iterations: int = 10000
    gradient_tolerance: float = 1e-6
    c1: float = 1e-4
    c2: float = 0.9
    max_line_search_trials: int = 50
    line_search: Callable = field(default=strong_wolfe_line_search, repr=False, compare=False)

    requirement = FunctionClass.DIFFERENTIABLE

    def check(self, function, x):
        super().check(function, x)
        require(ElementTypeRequirement.FLOATING_POINT, x)
        if self.memory < 1:
            raise ValueError("memory must be at least 1")

    def _run(self, run, x):
        objective, gradient = run.evaluate_with_gradient(x)
        run.accept(x, objective)
        run.history.append(objective)
        pairs = deque(maxlen=self.memory)
        while True:
            if np.max(np.abs(gradient)) < self.gradient_tolerance:
                return Termination.CONVERGED
            if run.iterations >= self.max_iterations:
                return Termination.MAX_ITERATIONS

            direction = two_loop_direction(gradient, pairs)
            slope = float(np.vdot(gradient, direction))
            if not pairs or not slope < 0:
                pairs.clear()
                direction = -gradient / np.linalg.norm(gradient)
                slope = float(np.vdot(gradient, direction))

            def phi(alpha, x=x, direction=direction):
                trial = x + alpha * direction
                f_t, g_t = run.function.evaluate_with_gradient(trial)
                if not (np.isfinite(f_t) and np.all(np.isfinite(g_t))):
                    return math.inf, math.nan, None
                g_t = np.asarray(g_t)
                run.fire("evaluate", trial, f_t)
                run.fire("gradient", trial, g_t)
                return float(f_t), float(np.vdot(g_t, direction)), (trial, f_t, g_t)

            result = self.line_search(
                phi,
                float(objective),
                slope,
                initial_step=1.0,
                c1=self.c1,
                c2=self.c2,
                max_trials=self.max_line_search_trials,
            )
            if result is None:
                run.line_search_failed = True
                return Termination.CONVERGED

            x_new, objective, gradient_new = result.payload
            s = x_new - x
            y = gradient_new - gradient
            sy = float(np.vdot(s, y))
            if sy > 1e-10 * float(np.vdot(y, y)):
                pairs.append((s, y, 1.0 / sy))
            x, gradient = x_new, gradient_new
            run.iterations += 1
            run.accept(x, objective)
            run.history.append(objective)
            run.fire("step_taken", x)


def lbfgs(function, x0, memory=10, max_iterations=10000, gradient_tolerance=1e-6, callbacks=()):
    return LBFGS(memory, max_iterations, gradient_tolerance).optimize(function, x0, callbacks)
