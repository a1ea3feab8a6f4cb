import math

import numpy as np
import pytest
from conftest import RecordingFunction
from hypothesis import given
from hypothesis import strategies as st

from flexopt.optimizers import (
    SGD,
    SMORMS3,
    AdaDelta,
    AdaDeltaUpdate,
    AdaGrad,
    AdaGradUpdate,
    Adam,
    AdamUpdate,
    AdaMax,
    AdaMaxUpdate,
    MomentumSGD,
    MomentumUpdate,
    NesterovMomentumSGD,
    NesterovMomentumUpdate,
    RMSProp,
    RMSPropUpdate,
    SMORMS3Update,
    StandardSGD,
    Termination,
    VanillaUpdate,
    sgd,
)
from flexopt.problems import LinearRegression, Sphere, synthetic_regression


class PartLog:
    """f_i(x) = (x_0 - i)^2 over n parts, logging which parts each call covers."""

    def __init__(self, n):
        self.n = n
        self.visits = []

    def num_functions(self):
        return self.n

    def separable_evaluate_with_gradient(self, x, begin, batch_size):
        self.visits.extend(range(begin, begin + batch_size))
        idx = np.arange(begin, begin + batch_size)
        r = x[0] - idx
        return float(r @ r), np.array([2.0 * r.sum()])


def _first_step(optimizer):
    return optimizer.optimize(Sphere(1), np.array([1.0])).best_coordinates[0]


def _single(**kwargs):
    return dict(batch_size=1, max_iterations=1, shuffle=False, **kwargs)


# closed forms from zeroed accumulators at x0 = 1 with g = 2
FIRST_STEP = {
    "adam": (lambda: Adam(**_single()), 1 - 0.001 * 2 / (2 + 1e-8)),
    "adagrad": (lambda: AdaGrad(**_single()), 1 - 0.01 * 2 / (2 + 1e-8)),
    "rmsprop": (lambda: RMSProp(**_single()), 1 - 0.01 * 2 / (0.2 + 1e-8)),
    "adadelta": (lambda: AdaDelta(**_single()), 1 - math.sqrt(1e-6) / math.sqrt(0.2 + 1e-6) * 2),
    "adamax": (lambda: AdaMax(**_single()), 1 - 0.002),
    "smorms3": (lambda: SMORMS3(**_single()), 1 - 2 * 0.001 / (math.sqrt(2) + 1e-16)),
    "momentum": (lambda: MomentumSGD(**_single()), 1 - 0.01 * 2),
    "nesterov": (lambda: NesterovMomentumSGD(**_single()), 1 - 0.01 * 2),
    "vanilla": (lambda: StandardSGD(**_single()), 1 - 0.01 * 2),
}


@pytest.mark.parametrize("name", FIRST_STEP)
def test_first_step_closed_form(name):
    make, expected = FIRST_STEP[name]
    assert _first_step(make()) == pytest.approx(expected, rel=1e-12)


def test_vanilla_full_batch_matches_gradient_descent():
    report = sgd(Sphere(2), np.ones(2), step_size=0.01, batch_size=2, max_iterations=1, shuffle=False)
    np.testing.assert_allclose(report.best_coordinates, [0.99, 0.99], rtol=1e-15)


class TestPolicies:
    def test_momentum_second_step(self):
        p = MomentumUpdate(0.5)
        x = p.update(np.array([1.0]), 0.1, np.array([2.0]))
        x = p.update(x, 0.1, np.array([2.0]))
        # v1 = 2, v2 = 0.5*2 + 2 = 3
        np.testing.assert_allclose(x, [1.0 - 0.2 - 0.3])

    def test_nesterov_lookahead(self):
        p = NesterovMomentumUpdate(0.5)
        x = np.array([1.0])
        assert p.lookahead(x, 0.1) is x
        x = p.update(x, 0.1, np.array([2.0]))
        np.testing.assert_allclose(p.lookahead(x, 0.1), x - 0.1 * 0.5 * 2.0)

    def test_adam_second_step(self):
        p = AdamUpdate()
        x = p.update(np.array([1.0]), 0.001, np.array([2.0]))
        x2 = p.update(x, 0.001, np.array([1.0]))
        m = 0.9 * 0.2 + 0.1 * 1.0
        v = 0.999 * 0.004 + 0.001 * 1.0
        m_hat, v_hat = m / (1 - 0.9**2), v / (1 - 0.999**2)
        assert x2[0] == pytest.approx(x[0] - 0.001 * m_hat / (math.sqrt(v_hat) + 1e-8), rel=1e-12)

    @pytest.mark.parametrize("policy", [VanillaUpdate, MomentumUpdate, NesterovMomentumUpdate,
                                        AdamUpdate, AdaMaxUpdate, AdaGradUpdate, AdaDeltaUpdate,
                                        RMSPropUpdate, SMORMS3Update])
    def test_reset_restores_first_step(self, policy):
        p = policy()
        x0, g = np.array([1.0, -0.5]), np.array([2.0, -1.0])
        first = p.update(x0, 0.01, g)
        p.update(first, 0.01, g)
        p.reset()
        assert p.t == 0
        np.testing.assert_array_equal(p.update(x0, 0.01, g), first)

    @pytest.mark.parametrize("policy", [AdamUpdate, AdaGradUpdate, RMSPropUpdate, SMORMS3Update,
                                        AdaMaxUpdate, AdaDeltaUpdate, MomentumUpdate])
    def test_float32_state(self, policy):
        p = policy()
        x = p.update(np.ones(2, dtype=np.float32), 0.01, np.full(2, 2.0, dtype=np.float32))
        assert x.dtype == np.float32


class TestEpochs:
    @given(st.integers(1, 40), st.integers(1, 12), st.booleans())
    def test_each_part_once_per_epoch(self, n, b, shuffle):
        f = PartLog(n)
        per_epoch = math.ceil(n / b)
        report = SGD(step_size=0.001, batch_size=b, max_iterations=3 * per_epoch, tolerance=-1.0,
                     shuffle=shuffle, seed=n).optimize(f, np.zeros(1))
        assert report.iterations == 3 * per_epoch
        assert report.epochs == 3
        visits = f.visits[: 3 * n]
        for e in range(3):
            assert sorted(visits[e * n:(e + 1) * n]) == list(range(n))

    def test_shuffle_changes_order_deterministically(self):
        orders = []
        for _ in range(2):
            f = PartLog(20)
            SGD(batch_size=1, max_iterations=20, seed=7).optimize(f, np.zeros(1))
            orders.append(f.visits[:20])
        assert orders[0] == orders[1]
        assert orders[0] != list(range(20))

    def test_unshuffled_is_in_order(self):
        f = PartLog(6)
        SGD(batch_size=4, max_iterations=2, shuffle=False).optimize(f, np.zeros(1))
        assert f.visits[:6] == list(range(6))

    def test_epoch_objective_is_sum_of_batches(self):
        objectives = []

        class Catch:
            def evaluate(self, opt, f, x, objective):
                objectives.append(objective)

            def end_epoch(self, opt, f, x, epoch, objective):
                objectives.append(("epoch", objective))

        X, y = synthetic_regression(10, 2, seed=0)
        SGD(batch_size=4, max_iterations=3, shuffle=False).optimize(LinearRegression(X, y), np.zeros(2), [Catch()])
        batches, (_, epoch) = objectives[:3], objectives[3]
        assert epoch == batches[0] + batches[1] + batches[2]

    def test_planned_epochs(self):
        assert SGD(batch_size=10, max_iterations=25).planned_epochs(PartLog(30)) == 9
        assert SGD(max_iterations=0).planned_epochs(PartLog(30)) == 0

    def test_iteration_limit_mid_epoch(self):
        report = SGD(batch_size=2, max_iterations=3, tolerance=-1.0).optimize(PartLog(10), np.zeros(1))
        assert report.iterations == 3 and report.epochs == 0
        assert report.termination is Termination.MAX_ITERATIONS


class TestConvergence:
    def test_regression_converges(self):
        X, y = synthetic_regression(200, 4, noise=0.1, seed=3)
        problem = LinearRegression(X, y)
        report = SGD(step_size=0.01, batch_size=10, max_iterations=0, tolerance=1e-3, seed=1).optimize(
            problem, np.zeros(4))
        assert report.termination is Termination.CONVERGED
        np.testing.assert_allclose(report.best_coordinates, problem.least_squares_solution(), atol=0.05)
        assert report.final_objective == pytest.approx(problem.evaluate(report.best_coordinates))

    def test_deterministic_per_seed(self):
        X, y = synthetic_regression(50, 3, seed=3)
        a, b = RecordingFunction(LinearRegression(X, y)), RecordingFunction(LinearRegression(X, y))
        Adam(batch_size=7, max_iterations=40, seed=11).optimize(a, np.zeros(3))
        Adam(batch_size=7, max_iterations=40, seed=11).optimize(b, np.zeros(3))
        assert len(a.points) == len(b.points)
        assert all(np.array_equal(p, q) for p, q in zip(a.points, b.points))

    def test_rejects_bad_batch(self):
        with pytest.raises(ValueError):
            SGD(batch_size=0).optimize(Sphere(2), np.ones(2))
