import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


class EvalGrad:
    """Quadratic-plus-cosine objective supplying evaluate and gradient only."""

    def __init__(self, log=None):
        self.log = log if log is not None else []

    def evaluate(self, x):
        self.log.append("evaluate")
        return float(np.sum(x**2) + np.sum(np.cos(x)))

    def gradient(self, x):
        self.log.append("gradient")
        return 2 * x - np.sin(x)


class CombinedOnly:
    def __init__(self):
        self.calls = 0

    def evaluate_with_gradient(self, x):
        self.calls += 1
        return float(np.sum(x**2) + np.sum(np.cos(x))), 2 * x - np.sin(x)


class EvaluateOnly:
    def evaluate(self, x):
        return float(np.sum(x**2))


class RecordingFunction:
    """Wraps a problem and records every point at which it is evaluated."""

    def __init__(self, problem):
        self.problem = problem
        self.points = []

    def __getattr__(self, name):
        attr = getattr(self.problem, name)
        if not callable(attr) or name in ("num_functions", "num_features", "num_constraints",
                                          "get_initial_point", "categorical_info"):
            return attr

        def recorded(*args):
            for a in args:
                if isinstance(a, np.ndarray):
                    self.points.append(a.copy())
            return attr(*args)

        return recorded


class EventLog:
    """Callback that records every event it sees."""

    def __init__(self, name="log", journal=None, terminate_on=None, after=1):
        self.name = name
        self.journal = journal if journal is not None else []
        self.events = []
        self.terminate_on = terminate_on
        self.after = after
        self._seen = 0

    def _handle(self, event):
        self.events.append(event)
        self.journal.append((self.name, event))
        if event == self.terminate_on:
            self._seen += 1
            return self._seen >= self.after
        return False

    def begin_optimization(self, opt, f, x):
        return self._handle("begin_optimization")

    def end_optimization(self, opt, f, x):
        return self._handle("end_optimization")

    def evaluate(self, opt, f, x, objective):
        return self._handle("evaluate")

    def evaluate_constraint(self, opt, f, x, index, value):
        return self._handle("evaluate_constraint")

    def gradient(self, opt, f, x, gradient):
        return self._handle("gradient")

    def gradient_constraint(self, opt, f, x, index, gradient):
        return self._handle("gradient_constraint")

    def begin_epoch(self, opt, f, x, epoch, objective):
        return self._handle("begin_epoch")

    def end_epoch(self, opt, f, x, epoch, objective):
        return self._handle("end_epoch")

    def step_taken(self, opt, f, x):
        return self._handle("step_taken")


class NoOp:
    """Implements every handler and never interferes."""

    def __getattr__(self, name):
        from flexopt.callbacks import EVENTS

        if name in EVENTS:
            return lambda *args: False
        raise AttributeError(name)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
