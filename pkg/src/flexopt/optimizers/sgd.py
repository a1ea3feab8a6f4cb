"""Mini-batch SGD over separable objectives, with pluggable update rules.

An update policy owns its accumulators and exposes
``update(x, step_size, gradient) -> new x``.  Policies are initialised lazily
from the first gradient so the accumulators take the coordinates' shape and
dtype.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..function import FunctionClass
from ..numerics import ElementTypeRequirement, require
from .base import NumericalFailure, Optimizer, Termination, finite


class UpdatePolicy:
    """Base for SGD update rules; ``t`` counts applied updates."""

    def __init__(self):
        self.t = 0

    def reset(self):
        self.t = 0

    def lookahead(self, x, step_size):
        """Point at which the gradient for the next update is taken."""
        return x

    def update(self, x, step_size, gradient):
        self.t += 1
        return self._update(x, step_size, gradient)

    def _update(self, x, step_size, gradient):
        raise NotImplementedError


class VanillaUpdate(UpdatePolicy):
    def _update(self, x, step_size, gradient):
        return x - step_size * gradient


class MomentumUpdate(UpdatePolicy):
    """``v <- mu v + g``, ``x <- x - step v``."""

    def __init__(self, momentum: float = 0.5):
        super().__init__()
        self.momentum = momentum
        self.velocity = None

    def reset(self):
        super().reset()
        self.velocity = None

    def _update(self, x, step_size, gradient):
        if self.velocity is None:
            self.velocity = np.zeros_like(x)
        self.velocity = self.momentum * self.velocity + gradient
        return x - step_size * self.velocity


class NesterovMomentumUpdate(MomentumUpdate):
    """Momentum with the gradient taken at ``x - step * mu * v``."""

    def lookahead(self, x, step_size):
        if self.velocity is None:
            return x
        return x - step_size * self.momentum * self.velocity


class AdamUpdate(UpdatePolicy):
    def __init__(self, beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        super().__init__()
        self.beta1, self.beta2, self.epsilon = beta1, beta2, epsilon
        self.m = self.v = None

    def reset(self):
        super().reset()
        self.m = self.v = None

    def _update(self, x, step_size, gradient):
        if self.m is None:
            self.m = np.zeros_like(x)
            self.v = np.zeros_like(x)
        b1, b2 = self.beta1, self.beta2
        self.m = b1 * self.m + (1 - b1) * gradient
        self.v = b2 * self.v + (1 - b2) * gradient * gradient
        m_hat = self.m / (1 - b1**self.t)
        v_hat = self.v / (1 - b2**self.t)
        return x - step_size * m_hat / (np.sqrt(v_hat) + self.epsilon)


class AdaMaxUpdate(UpdatePolicy):
    """Adam with the infinity norm; ``u`` is floored at ``epsilon``."""

    def __init__(self, beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        super().__init__()
        self.beta1, self.beta2, self.epsilon = beta1, beta2, epsilon
        self.m = self.u = None

    def reset(self):
        super().reset()
        self.m = self.u = None

    def _update(self, x, step_size, gradient):
        if self.m is None:
            self.m = np.zeros_like(x)
            self.u = np.zeros_like(x)
        self.m = self.beta1 * self.m + (1 - self.beta1) * gradient
        self.u = np.maximum(self.beta2 * self.u, np.abs(gradient))
        corrected = step_size / (1 - self.beta1**self.t)
        return x - corrected * self.m / np.maximum(self.u, self.epsilon)


class AdaGradUpdate(UpdatePolicy):
    def __init__(self, epsilon: float = 1e-8):
        super().__init__()
        self.epsilon = epsilon
        self.squared = None

    def reset(self):
        super().reset()
        self.squared = None

    def _update(self, x, step_size, gradient):
        if self.squared is None:
            self.squared = np.zeros_like(x)
        self.squared = self.squared + gradient * gradient
        return x - step_size * gradient / (np.sqrt(self.squared) + self.epsilon)


class AdaDeltaUpdate(UpdatePolicy):
    """Running RMS of gradients and of past updates; ``RMS(z) = sqrt(E[z^2] + eps)``.

    The step size multiplies the unit-free AdaDelta update (1.0 recovers the
    original rule).
    """

    def __init__(self, rho: float = 0.95, epsilon: float = 1e-6):
        super().__init__()
        self.rho, self.epsilon = rho, epsilon
        self.mean_sq_gradient = self.mean_sq_delta = None

    def reset(self):
        super().reset()
        self.mean_sq_gradient = self.mean_sq_delta = None

    def _update(self, x, step_size, gradient):
        if self.mean_sq_gradient is None:
            self.mean_sq_gradient = np.zeros_like(x)
            self.mean_sq_delta = np.zeros_like(x)
        rho, eps = self.rho, self.epsilon
        self.mean_sq_gradient = rho * self.mean_sq_gradient + (1 - rho) * gradient * gradient
        delta = np.sqrt(self.mean_sq_delta + eps) / np.sqrt(self.mean_sq_gradient + eps) * gradient
        self.mean_sq_delta = rho * self.mean_sq_delta + (1 - rho) * delta * delta
        return x - step_size * delta


class RMSPropUpdate(UpdatePolicy):
    def __init__(self, rho: float = 0.99, epsilon: float = 1e-8):
        super().__init__()
        self.rho, self.epsilon = rho, epsilon
        self.mean_sq = None

    def reset(self):
        super().reset()
        self.mean_sq = None

    def _update(self, x, step_size, gradient):
        if self.mean_sq is None:
            self.mean_sq = np.zeros_like(x)
        self.mean_sq = self.rho * self.mean_sq + (1 - self.rho) * gradient * gradient
        return x - step_size * gradient / (np.sqrt(self.mean_sq) + self.epsilon)


class SMORMS3Update(UpdatePolicy):
    def __init__(self, epsilon: float = 1e-16):
        super().__init__()
        self.epsilon = epsilon
        self.mem = self.g = self.g2 = None

    def reset(self):
        super().reset()
        self.mem = self.g = self.g2 = None

    def _update(self, x, step_size, gradient):
        if self.mem is None:
            self.mem = np.ones_like(x)
            self.g = np.zeros_like(x)
            self.g2 = np.zeros_like(x)
        r = 1 / (self.mem + 1)
        self.g = (1 - r) * self.g + r * gradient
        self.g2 = (1 - r) * self.g2 + r * gradient * gradient
        zeta = self.g * self.g / (self.g2 + self.epsilon)
        x = x - gradient * np.minimum(step_size, zeta) / (np.sqrt(self.g2) + self.epsilon)
        self.mem = 1 + self.mem * (1 - zeta)
        return x


@dataclass
class SGD(Optimizer):
    """Mini-batch stochastic gradient descent.

    One iteration is one batch update using the batch-mean gradient; an epoch
    is one pass over all parts.  The epoch objective is the sum of the batch
    objectives seen during the pass.  ``max_iterations=0`` means no limit.
    """

    step_size: float = 0.01
    batch_size: int = 32
    max_iterations: int = 100000
    tolerance: float = 1e-5
    shuffle: bool = True
    policy: UpdatePolicy = field(default_factory=VanillaUpdate)
    seed: int = 0
    reset_policy: bool = True

    requirement = FunctionClass.DIFFERENTIABLE_SEPARABLE
    emits_epochs = True

    def check(self, function, x):
        super().check(function, x)
        require(ElementTypeRequirement.FLOATING_POINT, x)
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if function.num_functions() < 1:
            raise ValueError("separable function has no parts")

    def planned_epochs(self, function) -> int:
        if not self.max_iterations:
            return 0
        per_epoch = math.ceil(function.num_functions() / self.batch_size)
        return math.ceil(self.max_iterations / per_epoch)

    def _run(self, run, x):
        f = run.function
        n = f.num_functions()
        rng = np.random.default_rng(self.seed)
        if self.reset_policy:
            self.policy.reset()
        run.accept(x, math.nan)
        previous = math.inf
        epoch = 0
        while True:
            order = rng.permutation(n) if self.shuffle else np.arange(n)
            run.fire("begin_epoch", x, epoch, previous)
            epoch_objective = 0.0
            for start in range(0, n, self.batch_size):
                parts = order[start : start + self.batch_size]
                point = self.policy.lookahead(x, self.step_size)
                objective, gradient = f.batch_evaluate_with_gradient(point, parts)
                require(ElementTypeRequirement.SAME_INTERNAL_TYPES, x, gradient)
                if not (finite(objective) and finite(gradient)):
                    raise NumericalFailure
                run.fire("evaluate", point, objective)
                run.fire("gradient", point, gradient)
                epoch_objective += objective
                x = self.policy.update(x, self.step_size, gradient / len(parts))
                run.iterations += 1
                run.accept(x, math.nan)
                run.fire("step_taken", x)
                limit = self.max_iterations and run.iterations >= self.max_iterations
                if limit and start + self.batch_size < n:
                    break
            else:
                epoch += 1
                run.epochs = epoch
                run.history.append(epoch_objective)
                run.fire("end_epoch", x, epoch, epoch_objective)
                if abs(epoch_objective - previous) < self.tolerance:
                    self._finish(run, x)
                    return Termination.CONVERGED
                previous = epoch_objective
                if self.max_iterations and run.iterations >= self.max_iterations:
                    self._finish(run, x)
                    return Termination.MAX_ITERATIONS
                continue
            self._finish(run, x)
            return Termination.MAX_ITERATIONS

    def _finish(self, run, x):
        # one full evaluation so the report's objective matches its coordinates
        run.accept(x, run.evaluate(x))


def sgd(function, x0, policy=None, step_size=0.01, batch_size=32, max_iterations=100000,
        tolerance=1e-5, shuffle=True, seed=0, callbacks=()):
    optimizer = SGD(step_size, batch_size, max_iterations, tolerance, shuffle,
                    policy if policy is not None else VanillaUpdate(), seed)
    return optimizer.optimize(function, x0, callbacks)


def StandardSGD(**kwargs) -> SGD:
    return SGD(policy=VanillaUpdate(), **kwargs)


def MomentumSGD(momentum: float = 0.5, **kwargs) -> SGD:
    return SGD(policy=MomentumUpdate(momentum), **kwargs)


def NesterovMomentumSGD(momentum: float = 0.5, **kwargs) -> SGD:
    return SGD(policy=NesterovMomentumUpdate(momentum), **kwargs)


def Adam(step_size: float = 0.001, **kwargs) -> SGD:
    return SGD(step_size=step_size, policy=AdamUpdate(), **kwargs)


def AdaMax(step_size: float = 0.002, **kwargs) -> SGD:
    return SGD(step_size=step_size, policy=AdaMaxUpdate(), **kwargs)


def AdaGrad(step_size: float = 0.01, **kwargs) -> SGD:
    return SGD(step_size=step_size, policy=AdaGradUpdate(), **kwargs)


def AdaDelta(step_size: float = 1.0, **kwargs) -> SGD:
    return SGD(step_size=step_size, policy=AdaDeltaUpdate(), **kwargs)


def RMSProp(step_size: float = 0.01, **kwargs) -> SGD:
    return SGD(step_size=step_size, policy=RMSPropUpdate(), **kwargs)


def SMORMS3(step_size: float = 0.001, **kwargs) -> SGD:
    return SGD(step_size=step_size, policy=SMORMS3Update(), **kwargs)
