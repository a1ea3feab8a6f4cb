from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..function import FunctionClass, wrap_full_function
from .base import Optimizer, Termination


@dataclass
class GridSearch(Optimizer):
    """Exhaustive search over a Cartesian grid of allowed values.

    Combinations are visited in odometer order (last dimension fastest) and
    the first minimiser found wins ties.  With ``dimensions=None`` the values
    come from the function's ``categorical_info()``.  The starting coordinates
    passed to :meth:`optimize` only fix the dtype and shape of the result.
    """

    dimensions: Sequence[Sequence] | None = None

    def check(self, function, x):
        requirement = FunctionClass.CATEGORICAL if self.dimensions is None else FunctionClass.ARBITRARY
        function.require(requirement)

    def _grid(self, function):
        dims = self.dimensions if self.dimensions is not None else function.categorical_info()
        dims = [list(d) for d in dims]
        if not dims:
            raise ValueError("grid search needs at least one dimension")
        if any(len(d) == 0 for d in dims):
            raise ValueError("every dimension needs at least one allowed value")
        return dims

    def _run(self, run, x):
        dims = self._grid(run.function)
        dtype, shape = x.dtype, x.shape
        if x.size != len(dims):
            shape = (len(dims),)
        best_objective = None
        for combo in itertools.product(*dims):
            point = np.asarray(combo, dtype=dtype).reshape(shape)
            objective = run.evaluate(point)
            run.iterations += 1
            if best_objective is None or objective < best_objective:
                best_objective = objective
                run.accept(point, objective)
                run.history.append(objective)
        return Termination.CONVERGED


def grid_search(function, dimensions=None, dtype=None, callbacks=()):
    if dimensions is None:
        dims = wrap_full_function(function).categorical_info()
    else:
        dims = dimensions
    if not len(dims):
        raise ValueError("grid search needs at least one dimension")
    if dtype is None:
        dtype = np.result_type(*[np.asarray(list(d)).dtype for d in dims])
    template = np.zeros(len(dims), dtype=dtype)
    return GridSearch(dimensions).optimize(function, template, callbacks)
