"""Test objectives with analytic gradients, starting points and known optima."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from operator import add

import numpy as np

from .function import CapabilitySet, detect_capabilities


@dataclass(frozen=True)
class ProblemDescriptor:
    name: str
    dimension: int
    initial_point: np.ndarray
    known_optimum: np.ndarray | None
    known_minimum_value: float | None
    capabilities: CapabilitySet


def _ascending_sum(values):
    """Left-to-right sum; keeps the element type of ``values``."""
    return reduce(add, values)


class Rosenbrock:
    """``100 (x2 - x1^2)^2 + (1 - x1)^2``; minimum 0 at (1, 1)."""

    name = "rosenbrock"

    def __init__(self, dtype=np.float64):
        self.dtype = np.dtype(dtype)

    def evaluate(self, x):
        x1, x2 = x.reshape(-1)
        return 100 * (x2 - x1 * x1) ** 2 + (1 - x1) ** 2

    def gradient(self, x):
        x1, x2 = x.reshape(-1)
        inner = x2 - x1 * x1
        g = np.array([-400 * x1 * inner - 2 * (1 - x1), 200 * inner], dtype=x.dtype)
        return g.reshape(x.shape)

    def get_initial_point(self):
        return np.array([-1.2, 1.0], dtype=self.dtype)

    def descriptor(self) -> ProblemDescriptor:
        return ProblemDescriptor(self.name, 2, self.get_initial_point(),
                                 np.ones(2, dtype=self.dtype), 0.0, detect_capabilities(self))


class Sphere:
    """``sum_j (x_j - c_j)^2`` with centre ``c`` (zero by default).

    Offers the full, separable (part ``i`` is coordinate ``i``) and
    partial-gradient forms.
    """

    name = "sphere"

    def __init__(self, dimension: int = 2, center=None, dtype=np.float64):
        self.dimension = dimension
        self.dtype = np.dtype(dtype)
        self.center = None if center is None else np.asarray(center, dtype=self.dtype)

    def _shifted(self, x):
        return x if self.center is None else x - self.center.reshape(x.shape)

    def evaluate(self, x):
        z = self._shifted(x).reshape(-1)
        return _ascending_sum(z * z)

    def gradient(self, x):
        return 2 * self._shifted(x)

    def num_functions(self):
        return self.dimension

    def separable_evaluate(self, x, begin, batch_size):
        z = self._shifted(x).reshape(-1)[begin : begin + batch_size]
        return _ascending_sum(z * z)

    def separable_gradient(self, x, begin, batch_size):
        g = np.zeros_like(x)
        z = self._shifted(x).reshape(-1)
        g.reshape(-1)[begin : begin + batch_size] = 2 * z[begin : begin + batch_size]
        return g

    def num_features(self):
        return self.dimension

    def partial_gradient(self, x, j):
        return self.separable_gradient(x, j, 1)

    def get_initial_point(self):
        return np.ones(self.dimension, dtype=self.dtype)

    def descriptor(self) -> ProblemDescriptor:
        optimum = np.zeros(self.dimension, dtype=self.dtype) if self.center is None else self.center.copy()
        return ProblemDescriptor(self.name, self.dimension, self.get_initial_point(),
                                 optimum, 0.0, detect_capabilities(self))


def _styblinski_tang_root() -> float:
    # global minimiser of x^4 - 16x^2 + 5x, by Newton from the left basin
    t = -3.0
    for _ in range(50):
        t -= (4 * t**3 - 32 * t + 5) / (12 * t**2 - 32)
    return t


class StyblinskiTang:
    """``0.5 * sum_j (x_j^4 - 16 x_j^2 + 5 x_j)``."""

    name = "styblinski-tang"
    minimizer = _styblinski_tang_root()

    def __init__(self, dimension: int = 2, dtype=np.float64):
        self.dimension = dimension
        self.dtype = np.dtype(dtype)

    def evaluate(self, x):
        z = x.reshape(-1)
        return 0.5 * _ascending_sum(z**4 - 16 * z**2 + 5 * z)

    def gradient(self, x):
        return 0.5 * (4 * x**3 - 32 * x + 5)

    def get_initial_point(self):
        return np.zeros(self.dimension, dtype=self.dtype)

    def descriptor(self) -> ProblemDescriptor:
        optimum = np.full(self.dimension, self.minimizer, dtype=self.dtype)
        t = self.minimizer
        value = 0.5 * self.dimension * (t**4 - 16 * t**2 + 5 * t)
        return ProblemDescriptor(self.name, self.dimension, self.get_initial_point(),
                                 optimum, value, detect_capabilities(self))


class LinearRegression:
    """Least squares ``f(theta) = ||X theta - y||^2``.

    ``residual_computations`` counts evaluations of ``X theta - y`` (full or
    for a batch of rows), which is the work shared by the objective and the
    gradient.
    """

    name = "linear-regression"

    def __init__(self, X, y):
        X = np.asarray(X)
        y = np.asarray(y)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ValueError(f"shape mismatch: X {X.shape}, y {y.shape}")
        if X.shape[0] < 1:
            raise ValueError("need at least one sample")
        self.X = X
        self.y = y
        self.residual_computations = 0

    def _residual(self, theta, rows=slice(None)):
        self.residual_computations += 1
        return self.X[rows] @ theta - self.y[rows]

    def evaluate(self, theta):
        r = self._residual(theta)
        return r @ r

    def gradient(self, theta):
        r = self._residual(theta)
        return 2 * (self.X.T @ r)

    def evaluate_with_gradient(self, theta):
        r = self._residual(theta)
        return r @ r, 2 * (self.X.T @ r)

    def num_functions(self):
        return self.X.shape[0]

    def separable_evaluate(self, theta, begin, batch_size):
        r = self._residual(theta, slice(begin, begin + batch_size))
        return r @ r

    def separable_gradient(self, theta, begin, batch_size):
        rows = slice(begin, begin + batch_size)
        r = self._residual(theta, rows)
        return 2 * (self.X[rows].T @ r)

    def separable_evaluate_with_gradient(self, theta, begin, batch_size):
        rows = slice(begin, begin + batch_size)
        r = self._residual(theta, rows)
        return r @ r, 2 * (self.X[rows].T @ r)

    def get_initial_point(self):
        return np.zeros(self.X.shape[1], dtype=self.X.dtype)

    def least_squares_solution(self):
        return np.linalg.lstsq(self.X, self.y, rcond=None)[0]

    def descriptor(self) -> ProblemDescriptor:
        theta = self.least_squares_solution()
        r = self.X @ theta - self.y
        return ProblemDescriptor(self.name, self.X.shape[1], self.get_initial_point(),
                                 theta, float(r @ r), detect_capabilities(self))


class ConstrainedQuadratic:
    """``(x1 - 2)^2 + (x2 - 1)^2`` subject to ``x1 + x2 - 1 = 0``; solution (1, 0), f = 2."""

    name = "constrained-quadratic"

    def evaluate(self, x):
        return (x[0] - 2) ** 2 + (x[1] - 1) ** 2

    def gradient(self, x):
        return np.array([2 * (x[0] - 2), 2 * (x[1] - 1)], dtype=x.dtype)

    def num_constraints(self):
        return 1

    def evaluate_constraint(self, i, x):
        return x[0] + x[1] - 1

    def gradient_constraint(self, i, x):
        return np.ones(2, dtype=x.dtype)

    def get_initial_point(self):
        return np.zeros(2)

    def descriptor(self) -> ProblemDescriptor:
        return ProblemDescriptor(self.name, 2, self.get_initial_point(),
                                 np.array([1.0, 0.0]), 2.0, detect_capabilities(self))


def rosenbrock(x):
    return Rosenbrock().evaluate(np.asarray(x))


def sphere(x):
    x = np.asarray(x)
    return Sphere(x.size).evaluate(x)


def styblinski_tang(x):
    x = np.asarray(x)
    return StyblinskiTang(x.size).evaluate(x)


def linear_regression(X, y) -> LinearRegression:
    return LinearRegression(X, y)


def constrained_quadratic() -> ConstrainedQuadratic:
    return ConstrainedQuadratic()


def synthetic_regression(n: int, d: int, noise: float = 1.0, seed: int = 0, return_truth: bool = False):
    """Gaussian design with a faint linear signal: ``y = X theta + noise * eps``.

    ``theta`` is a seeded unit vector.  Returns ``(X, y)``, or
    ``(X, y, theta)`` with ``return_truth=True``.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be at least 1")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    theta = rng.standard_normal(d)
    theta /= np.linalg.norm(theta)
    y = X @ theta + noise * rng.standard_normal(n)
    return (X, y, theta) if return_truth else (X, y)
