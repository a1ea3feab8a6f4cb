import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from flexopt.function import FullFunction, expose
from flexopt.numerics import finite_difference_gradient, relative_error
from flexopt.optimizers import LBFGS
from flexopt.problems import (
    ConstrainedQuadratic,
    LinearRegression,
    Rosenbrock,
    Sphere,
    StyblinskiTang,
    constrained_quadratic,
    rosenbrock,
    sphere,
    styblinski_tang,
    synthetic_regression,
)


def _regression_instance():
    X, y = synthetic_regression(30, 4, noise=0.5, seed=3)
    return LinearRegression(X, y)


SMOOTH = {
    "rosenbrock": (Rosenbrock, 2, 2.0),
    "sphere": (lambda: Sphere(5), 5, 3.0),
    "shifted-sphere": (lambda: Sphere(3, center=[0.5, -1.0, 2.0]), 3, 3.0),
    "styblinski-tang": (lambda: StyblinskiTang(4), 4, 4.0),
    "linear-regression": (_regression_instance, 4, 2.0),
    "constrained-quadratic": (ConstrainedQuadratic, 2, 3.0),
}


@pytest.mark.parametrize("name", SMOOTH)
def test_gradient_matches_central_differences(name):
    factory, dim, spread = SMOOTH[name]
    problem = factory()
    rng = np.random.default_rng(hash(name) % 2**32)
    for _ in range(10):
        x = rng.uniform(-spread, spread, dim)
        fd = finite_difference_gradient(problem.evaluate, x, 1e-6)
        assert relative_error(problem.gradient(x), fd) <= 1e-5


@pytest.mark.parametrize("problem", [Rosenbrock(), Sphere(3), Sphere(2, center=[1.0, 2.0]),
                                     StyblinskiTang(3), ConstrainedQuadratic(),
                                     _regression_instance()])
def test_descriptor_optimum_matches_minimum(problem):
    desc = problem.descriptor()
    assert desc.initial_point.shape == (desc.dimension,)
    if problem.name == "constrained-quadratic":
        # constrained optimum: value of f on the feasible solution
        assert problem.evaluate(desc.known_optimum) == pytest.approx(desc.known_minimum_value, abs=1e-12)
        return
    assert problem.evaluate(desc.known_optimum) == pytest.approx(desc.known_minimum_value, abs=1e-12)


class TestRosenbrock:
    @pytest.mark.parametrize("x, expected", [((1, 1), 0.0), ((0, 0), 1.0), ((-1, 1), 4.0)])
    def test_values(self, x, expected):
        assert rosenbrock(np.array(x, dtype=float)) == expected

    def test_initial_point(self):
        np.testing.assert_array_equal(Rosenbrock().get_initial_point(), [-1.2, 1.0])

    def test_float32(self):
        x = np.array([-1.2, 1.0], dtype=np.float32)
        assert Rosenbrock().gradient(x).dtype == np.float32
        assert np.asarray(Rosenbrock().evaluate(x)).dtype == np.float32


class TestSphere:
    def test_values(self):
        assert sphere(np.zeros(4)) == 0.0
        assert sphere(np.array([1.0, 1.0])) == 2.0
        np.testing.assert_array_equal(Sphere(2).gradient(np.ones(2)), [2.0, 2.0])

    def test_integer_evaluate(self):
        assert sphere(np.array([2, -3])) == 13

    def test_partial_gradient_is_sparse(self):
        g = Sphere(2).partial_gradient(np.array([1.0, 1.0]), 0)
        np.testing.assert_array_equal(g, [2.0, 0.0])
        assert np.flatnonzero(g).tolist() == [0]

    @given(arrays(np.float64, st.integers(1, 8), elements=st.floats(-100, 100)))
    def test_separable_sum_is_bit_exact(self, x):
        s = Sphere(x.size)
        total = None
        for i in range(x.size):
            part = s.separable_evaluate(x, i, 1)
            total = part if total is None else total + part
        assert total == s.evaluate(x)
        assert FullFunction(expose(s, "separable_evaluate", "num_functions")).evaluate(x) == s.evaluate(x)


class TestStyblinskiTang:
    @staticmethod
    def _oracle_minimizer():
        # brute force on a fine grid, then polish with the cubic's real roots
        grid = np.linspace(-5, 5, 2_000_001)
        values = grid**4 - 16 * grid**2 + 5 * grid
        coarse = grid[np.argmin(values)]
        roots = np.roots([4.0, 0.0, -32.0, 5.0])
        real = roots[np.isreal(roots)].real
        return real[np.argmin(np.abs(real - coarse))]

    def test_origin(self):
        assert styblinski_tang(np.zeros(2)) == 0.0

    def test_minimum(self):
        t = self._oracle_minimizer()
        assert t == pytest.approx(-2.903534, abs=1e-6)
        assert StyblinskiTang.minimizer == pytest.approx(t, abs=1e-12)
        value = styblinski_tang(np.array([t, t]))
        assert value == pytest.approx(-78.332, abs=1e-3)
        np.testing.assert_allclose(StyblinskiTang(2).gradient(np.array([t, t])), 0.0, atol=1e-4)


class TestLinearRegression:
    def test_identity_design(self):
        f = LinearRegression(np.eye(2), np.array([1.0, 2.0]))
        theta = np.zeros(2)
        assert f.evaluate(theta) == 5.0
        np.testing.assert_array_equal(f.gradient(theta), [-2.0, -4.0])
        assert f.separable_evaluate(theta, 0, 1) == 1.0
        assert f.separable_evaluate(theta, 1, 1) == 4.0
        assert f.separable_evaluate(theta, 0, 2) == 5.0

    def test_separable_gradient_sums_to_full(self):
        f = _regression_instance()
        theta = np.linspace(-1, 1, 4)
        total = sum(f.separable_gradient(theta, i, 1) for i in range(f.num_functions()))
        np.testing.assert_allclose(total, f.gradient(theta), rtol=1e-12)
        parts = sum(f.separable_evaluate(theta, i, 1) for i in range(f.num_functions()))
        assert parts == pytest.approx(f.evaluate(theta), rel=1e-12)

    def test_least_squares_solution_has_zero_gradient(self):
        X, y = synthetic_regression(200, 10, noise=1.0, seed=11)
        f = LinearRegression(X, y)
        # normal equations as the oracle
        theta = np.linalg.solve(X.T @ X, X.T @ y)
        assert np.linalg.norm(f.gradient(theta)) < 1e-8

    def test_combined_counts_one_residual(self):
        f = _regression_instance()
        f.evaluate_with_gradient(np.zeros(4))
        assert f.residual_computations == 1

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            LinearRegression(np.ones((3, 2)), np.ones(4))
        with pytest.raises(ValueError):
            LinearRegression(np.ones(3), np.ones(3))


class TestSyntheticRegression:
    def test_deterministic(self):
        a = synthetic_regression(50, 5, 1.0, seed=7)
        b = synthetic_regression(50, 5, 1.0, seed=7)
        for u, v in zip(a, b):
            np.testing.assert_array_equal(u, v)

    def test_noise_free_truth_is_exact(self):
        X, y, theta = synthetic_regression(40, 6, noise=0.0, seed=1, return_truth=True)
        assert np.linalg.norm(theta) == pytest.approx(1.0)
        assert LinearRegression(X, y).evaluate(theta) == 0.0

    def test_lbfgs_decreases_every_iteration(self):
        X, y = synthetic_regression(1000, 100, noise=1.0, seed=5)
        report = LBFGS(max_iterations=10, gradient_tolerance=0.0).optimize(
            LinearRegression(X, y), np.zeros(100))
        assert report.iterations == 10
        history = report.objective_history
        assert len(history) == 11
        assert all(b < a for a, b in zip(history, history[1:]))

    def test_invalid_sizes(self):
        with pytest.raises(ValueError):
            synthetic_regression(0, 3)


class TestConstrainedQuadratic:
    def test_solution(self):
        q = constrained_quadratic()
        x = np.array([1.0, 0.0])
        assert q.evaluate_constraint(0, x) == 0.0
        assert q.evaluate(x) == 2.0
        np.testing.assert_array_equal(q.gradient_constraint(0, np.array([5.0, -3.0])), [1.0, 1.0])

    def test_lagrange_conditions_hold_at_solution(self):
        # grad f + mu * grad c = 0 with mu = 2 at (1, 0)
        q = ConstrainedQuadratic()
        x = np.array([1.0, 0.0])
        np.testing.assert_allclose(q.gradient(x) + 2.0 * q.gradient_constraint(0, x), 0.0)
