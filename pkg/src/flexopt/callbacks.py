"""Optimizer-independent callbacks.

A callback is any object with one or more of these methods; each receives the
optimizer, the :class:`~flexopt.function.FullFunction` being optimized and the
current coordinates, plus event-specific arguments:

====================================================  ==========================
handler                                               fired
====================================================  ==========================
``begin_optimization(opt, f, x)``                     once, before the first step
``end_optimization(opt, f, x)``                       once, after the last step
``evaluate(opt, f, x, objective)``                    after each objective call
``evaluate_constraint(opt, f, x, index, value)``      after each constraint call
``gradient(opt, f, x, gradient)``                     after each gradient call
``gradient_constraint(opt, f, x, index, gradient)``   after each constraint gradient
``begin_epoch(opt, f, x, epoch, objective)``          before a pass over the parts
``end_epoch(opt, f, x, epoch, objective)``            after a pass over the parts
``step_taken(opt, f, x)``                             after each parameter update
====================================================  ==========================

A handler returning a truthy value asks the optimizer to stop.  Handlers that
a callback does not define are skipped.
"""
from __future__ import annotations

import enum
import math
import sys
from typing import Iterable, TextIO

import numpy as np

EVENTS = (
    "begin_optimization",
    "end_optimization",
    "evaluate",
    "evaluate_constraint",
    "gradient",
    "gradient_constraint",
    "begin_epoch",
    "end_epoch",
    "step_taken",
)


class CallbackDecision(enum.Enum):
    CONTINUE = "continue"
    TERMINATE = "terminate"

    def __bool__(self) -> bool:
        return self is CallbackDecision.TERMINATE


def dispatch(event: str, callbacks: Iterable, optimizer, function, coordinates, *args) -> CallbackDecision:
    """Invoke ``event`` on each callback in order, stopping at the first that terminates."""
    if event not in EVENTS:
        raise ValueError(f"unknown callback event {event!r}")
    for callback in callbacks:
        handler = getattr(callback, event, None)
        if handler is None:
            continue
        if handler(optimizer, function, coordinates, *args):
            return CallbackDecision.TERMINATE
    return CallbackDecision.CONTINUE


def _epoch_mode(optimizer) -> bool:
    return bool(getattr(optimizer, "emits_epochs", False))


class EarlyStopAtMinLoss:
    """Stop once ``patience`` consecutive epochs fail to beat the best objective."""

    def __init__(self, patience: int = 10):
        if patience < 1:
            raise ValueError("patience must be at least 1")
        self.patience = patience
        self.best = math.inf
        self.stale = 0

    def begin_optimization(self, optimizer, function, coordinates):
        self.best = math.inf
        self.stale = 0

    def end_epoch(self, optimizer, function, coordinates, epoch, objective):
        if objective < self.best:
            self.best = objective
            self.stale = 0
            return False
        self.stale += 1
        return self.stale >= self.patience


class StoreBestCoordinates:
    """Keep a copy of the coordinates with the lowest observed objective.

    Epoch-based optimizers are observed at the end of each epoch, everything
    else after each objective evaluation.
    """

    def __init__(self):
        self._best = None
        self.best_objective = math.inf

    @property
    def best_coordinates(self):
        """Copy of the best coordinates seen, or ``None`` before any observation."""
        return None if self._best is None else self._best.copy()

    def _observe(self, coordinates, objective):
        if self._best is None or objective < self.best_objective:
            self.best_objective = objective
            self._best = np.array(coordinates, copy=True)

    def evaluate(self, optimizer, function, coordinates, objective):
        if not _epoch_mode(optimizer):
            self._observe(coordinates, objective)

    def end_epoch(self, optimizer, function, coordinates, epoch, objective):
        self._observe(coordinates, objective)


class PrintLoss:
    """Write the objective to ``sink`` once per epoch (or per evaluation)."""

    def __init__(self, sink: TextIO | None = None):
        self.sink = sink

    @property
    def _out(self):
        return self.sink if self.sink is not None else sys.stdout

    def evaluate(self, optimizer, function, coordinates, objective):
        if not _epoch_mode(optimizer):
            print(repr(float(objective)), file=self._out)

    def end_epoch(self, optimizer, function, coordinates, epoch, objective):
        print(repr(float(objective)), file=self._out)


class ProgressBar:
    """Text progress bar over epochs.

    The epoch total is taken from the optimizer's ``planned_epochs()`` when
    available, otherwise from ``epochs``.  Terminals get a carriage-return
    redraw; other sinks get one line per update.
    """

    def __init__(self, width: int = 40, sink: TextIO | None = None, epochs: int | None = None):
        self.width = width
        self.sink = sink
        self.epochs = epochs
        self._total = epochs
        self._done = 0
        self._closed = False

    @property
    def _out(self):
        return self.sink if self.sink is not None else sys.stdout

    def _tty(self) -> bool:
        isatty = getattr(self._out, "isatty", None)
        return bool(isatty and isatty())

    def render(self, done: int, total: int, objective: float | None = None) -> str:
        fraction = 1.0 if total <= 0 else min(done / total, 1.0)
        filled = int(round(fraction * self.width))
        bar = "=" * filled + (">" if filled < self.width else "") + " " * (self.width - filled - 1)
        text = f"{done}/{total} [{bar[: self.width]}] {int(fraction * 100):3d}%"
        if objective is not None:
            text += f" loss: {objective:.6g}"
        return text

    def _emit(self, text: str, final: bool = False):
        out = self._out
        if self._tty():
            out.write("\r" + text)
            if final:
                out.write("\n")
        else:
            out.write(text + "\n")
        if hasattr(out, "flush"):
            out.flush()

    def begin_optimization(self, optimizer, function, coordinates):
        planned = getattr(optimizer, "planned_epochs", None)
        total = self.epochs
        if total is None and callable(planned):
            total = planned(function)
        self._total = total if total else 0
        self._done = 0
        self._closed = False
        self._emit(self.render(0, self._total))

    def end_epoch(self, optimizer, function, coordinates, epoch, objective):
        self._done += 1
        final = self._total > 0 and self._done >= self._total
        self._emit(self.render(self._done, self._total, objective), final=final)
        self._closed = final

    def end_optimization(self, optimizer, function, coordinates):
        if not self._closed and self._tty():
            self._out.write("\n")
        self._closed = True
