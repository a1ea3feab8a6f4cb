"""Objective-function capability detection and method inference.

A user objective is any object exposing some of the methods below.  The
framework never requires a base class; it inspects what is there and fills in
whatever can be derived.

=====================================  ==========================================
method                                 meaning
=====================================  ==========================================
``evaluate(x)``                        objective value
``gradient(x)``                        gradient, same shape/dtype as ``x``
``evaluate_with_gradient(x)``          ``(objective, gradient)`` sharing work
``num_functions()``                    number of separable parts
``separable_evaluate(x, begin, n)``    sum of parts ``begin .. begin+n-1``
``separable_gradient(x, begin, n)``    gradient of that sum
``separable_evaluate_with_gradient``   both at once, same arguments
``num_features()``                     number of coordinate blocks
``partial_gradient(x, j)``             gradient along block ``j`` only
``num_constraints()``                  number of equality constraints
``evaluate_constraint(i, x)``          ``c_i(x)``
``gradient_constraint(i, x)``          gradient of ``c_i``
``categorical_info()``                 allowed values per dimension
``get_initial_point()``                default starting coordinates
=====================================  ==========================================
"""
from __future__ import annotations

import dataclasses
import enum
import inspect
from dataclasses import dataclass

import numpy as np


class CapabilityError(TypeError):
    """A function lacks the methods an optimizer (or a caller) needs."""


# flag name -> (method names, positional arity of each)
_METHODS = {
    "has_evaluate": (("evaluate", 1),),
    "has_gradient": (("gradient", 1),),
    "has_evaluate_with_gradient": (("evaluate_with_gradient", 1),),
    "has_separable_evaluate": (("separable_evaluate", 3),),
    "has_separable_gradient": (("separable_gradient", 3),),
    "has_separable_evaluate_with_gradient": (("separable_evaluate_with_gradient", 3),),
    "has_num_functions": (("num_functions", 0),),
    "has_partial_gradient": (("partial_gradient", 2),),
    "has_num_features": (("num_features", 0),),
    "has_constraints": (
        ("num_constraints", 0),
        ("evaluate_constraint", 2),
        ("gradient_constraint", 2),
    ),
    "has_categorical_info": (("categorical_info", 0),),
    "has_initial_point": (("get_initial_point", 0),),
}


@dataclass(frozen=True)
class CapabilitySet:
    has_evaluate: bool = False
    has_gradient: bool = False
    has_evaluate_with_gradient: bool = False
    has_separable_evaluate: bool = False
    has_separable_gradient: bool = False
    has_separable_evaluate_with_gradient: bool = False
    has_num_functions: bool = False
    has_partial_gradient: bool = False
    has_num_features: bool = False
    has_constraints: bool = False
    has_categorical_info: bool = False
    has_initial_point: bool = False

    def methods(self) -> list[str]:
        """Method names covered by the set flags, in declaration order."""
        names = []
        for field in dataclasses.fields(self):
            if getattr(self, field.name):
                names.extend(name for name, _ in _METHODS[field.name])
        return names

    def closure(self) -> CapabilitySet:
        """Capabilities after applying every inference rule to a fixpoint."""
        c = dataclasses.asdict(self)
        changed = True
        while changed:
            before = dict(c)
            # separable analogues of the combine/split rules
            if c["has_separable_evaluate"] and c["has_separable_gradient"]:
                c["has_separable_evaluate_with_gradient"] = True
            if c["has_separable_evaluate_with_gradient"]:
                c["has_separable_evaluate"] = True
                c["has_separable_gradient"] = True
            if c["has_num_functions"]:
                if c["has_separable_evaluate"]:
                    c["has_evaluate"] = True
                if c["has_separable_gradient"]:
                    c["has_gradient"] = True
            if c["has_evaluate"] and c["has_gradient"]:
                c["has_evaluate_with_gradient"] = True
            if c["has_evaluate_with_gradient"]:
                c["has_evaluate"] = True
                c["has_gradient"] = True
            changed = c != before
        return CapabilitySet(**c)


def _accepts(method, arity: int) -> bool:
    try:
        sig = inspect.signature(method)
    except (TypeError, ValueError):
        # builtins without introspectable signatures: trust callability
        return True
    try:
        sig.bind(*([None] * arity))
    except TypeError:
        return False
    return True


def detect_capabilities(function) -> CapabilitySet:
    """Reflect which framework methods ``function`` supplies.

    Only attribute lookup and signature inspection are used; no user method is
    called.
    """
    if isinstance(function, FullFunction):
        return function.capabilities
    flags = {}
    for flag, methods in _METHODS.items():
        ok = True
        for name, arity in methods:
            method = getattr(function, name, None)
            if method is None or not callable(method) or not _accepts(method, arity):
                ok = False
                break
        flags[flag] = ok
    return CapabilitySet(**flags)


class FunctionClass(enum.Enum):
    ARBITRARY = "Arbitrary"
    DIFFERENTIABLE = "Differentiable"
    PARTIALLY_DIFFERENTIABLE = "PartiallyDifferentiable"
    ARBITRARY_SEPARABLE = "ArbitrarySeparable"
    DIFFERENTIABLE_SEPARABLE = "DifferentiableSeparable"
    CATEGORICAL = "Categorical"
    CONSTRAINED = "Constrained"


# Each class is admitted when the supplied methods cover at least one
# alternative.  Alternatives are phrased in user-facing method names and are
# checked against the *closure*, so e.g. a separable-only function is still
# Differentiable.
_REQUIREMENTS: dict[FunctionClass, tuple[tuple[str, ...], ...]] = {
    FunctionClass.ARBITRARY: (("evaluate",),),
    FunctionClass.DIFFERENTIABLE: (
        ("evaluate", "gradient"),
        ("evaluate_with_gradient",),
    ),
    FunctionClass.PARTIALLY_DIFFERENTIABLE: (
        ("evaluate", "partial_gradient", "num_features"),
    ),
    FunctionClass.ARBITRARY_SEPARABLE: (("separable_evaluate", "num_functions"),),
    FunctionClass.DIFFERENTIABLE_SEPARABLE: (
        ("separable_evaluate", "separable_gradient", "num_functions"),
        ("separable_evaluate_with_gradient", "num_functions"),
    ),
    FunctionClass.CATEGORICAL: (("evaluate", "categorical_info"),),
    FunctionClass.CONSTRAINED: (
        ("evaluate", "gradient", "num_constraints", "evaluate_constraint", "gradient_constraint"),
        ("evaluate_with_gradient", "num_constraints", "evaluate_constraint", "gradient_constraint"),
    ),
}


def classify(capabilities: CapabilitySet) -> frozenset[FunctionClass]:
    """All function classes the (inferred) capabilities admit."""
    available = set(capabilities.closure().methods())
    return frozenset(
        cls
        for cls, alternatives in _REQUIREMENTS.items()
        if any(set(alt) <= available for alt in alternatives)
    )


@dataclass(frozen=True)
class Diagnostic:
    """Outcome of a requirement check; truthy on success."""

    ok: bool
    requirement: FunctionClass
    supplied: tuple[str, ...]
    missing: tuple[tuple[str, ...], ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_requirements(capabilities: CapabilitySet, requirement: FunctionClass) -> Diagnostic:
    requirement = FunctionClass(requirement)
    supplied = tuple(capabilities.methods())
    if requirement in classify(capabilities):
        return Diagnostic(True, requirement, supplied)
    available = set(capabilities.closure().methods())
    missing = tuple(
        tuple(name for name in alt if name not in available)
        for alt in _REQUIREMENTS[requirement]
    )
    options = " or ".join(
        "(" + ", ".join(f"{name}()" for name in group) + ")" for group in missing
    )
    have = ", ".join(f"{name}()" for name in supplied) or "no recognised methods"
    message = (
        f"The FunctionType does not satisfy the requirements of a "
        f"{requirement.value} function: it is missing {options}.  "
        f"Supplied methods: {have}.  Please check that the FunctionType fully "
        f"satisfies the requirements of the FunctionType API; see the "
        f"flexopt.function module documentation for details."
    )
    return Diagnostic(False, requirement, supplied, missing, message)


class FullFunction:
    """Wrapper exposing every method inferable from a user objective.

    Counters record user-method invocations: ``evaluations`` counts
    ``evaluate``/``separable_evaluate`` calls, ``gradients`` counts
    ``gradient``/``separable_gradient``/``partial_gradient`` calls and
    ``combined`` counts the two ``*evaluate_with_gradient`` methods.  A
    synthesized method therefore counts each of its constituent calls.
    """

    def __init__(self, function):
        if isinstance(function, FullFunction):
            function = function.inner
        self.inner = function
        self.capabilities = detect_capabilities(function)
        self._closure = self.capabilities.closure()
        self.evaluations = 0
        self.gradients = 0
        self.combined = 0
        self.constraint_evaluations = 0
        self.constraint_gradients = 0

    def __repr__(self):
        return f"FullFunction({self.inner!r})"

    @property
    def inferred(self) -> CapabilitySet:
        return self._closure

    def classes(self) -> frozenset[FunctionClass]:
        return classify(self.capabilities)

    def require(self, requirement: FunctionClass) -> None:
        diagnostic = check_requirements(self.capabilities, requirement)
        if not diagnostic:
            raise CapabilityError(diagnostic.message)

    def reset_counters(self) -> None:
        self.evaluations = self.gradients = self.combined = 0
        self.constraint_evaluations = self.constraint_gradients = 0

    def _missing(self, name: str):
        have = ", ".join(self.capabilities.methods()) or "nothing"
        raise CapabilityError(
            f"{name}() is neither supplied by {type(self.inner).__name__} nor "
            f"inferable from the supplied methods ({have})."
        )

    # -- user-method trampolines (the only places counters move) ----------

    def _user_evaluate(self, x):
        self.evaluations += 1
        return self.inner.evaluate(x)

    def _user_gradient(self, x):
        self.gradients += 1
        return self.inner.gradient(x)

    def _user_combined(self, x):
        self.combined += 1
        return self.inner.evaluate_with_gradient(x)

    def _user_sep_evaluate(self, x, begin, batch_size):
        self.evaluations += 1
        return self.inner.separable_evaluate(x, begin, batch_size)

    def _user_sep_gradient(self, x, begin, batch_size):
        self.gradients += 1
        return self.inner.separable_gradient(x, begin, batch_size)

    def _user_sep_combined(self, x, begin, batch_size):
        self.combined += 1
        return self.inner.separable_evaluate_with_gradient(x, begin, batch_size)

    # -- separable methods -----------------------------------------------

    def num_functions(self) -> int:
        if not self.capabilities.has_num_functions:
            self._missing("num_functions")
        return int(self.inner.num_functions())

    def separable_evaluate(self, x, begin: int, batch_size: int = 1):
        caps = self.capabilities
        if caps.has_separable_evaluate:
            return self._user_sep_evaluate(x, begin, batch_size)
        if self._closure.has_separable_evaluate_with_gradient:
            return self._user_sep_combined(x, begin, batch_size)[0]
        self._missing("separable_evaluate")

    def separable_gradient(self, x, begin: int, batch_size: int = 1):
        caps = self.capabilities
        if caps.has_separable_gradient:
            return self._user_sep_gradient(x, begin, batch_size)
        if caps.has_separable_evaluate_with_gradient:
            return self._user_sep_combined(x, begin, batch_size)[1]
        self._missing("separable_gradient")

    def separable_evaluate_with_gradient(self, x, begin: int, batch_size: int = 1):
        caps = self.capabilities
        if caps.has_separable_evaluate_with_gradient:
            return self._user_sep_combined(x, begin, batch_size)
        if caps.has_separable_evaluate and caps.has_separable_gradient:
            objective = self._user_sep_evaluate(x, begin, batch_size)
            return objective, self._user_sep_gradient(x, begin, batch_size)
        self._missing("separable_evaluate_with_gradient")

    def batch_evaluate_with_gradient(self, x, parts):
        """Objective and gradient summed over ``parts``, in the order given.

        Consecutive ascending runs of part indices are passed to the user
        method as one ``(begin, batch_size)`` call.
        """
        objective = None
        gradient = None
        for begin, size in _runs(parts):
            obj, grad = self.separable_evaluate_with_gradient(x, begin, size)
            if objective is None:
                objective, gradient = obj, np.array(grad, copy=True)
            else:
                objective = objective + obj
                gradient += grad
        if objective is None:
            raise ValueError("empty batch")
        return objective, gradient

    # -- full-objective methods -------------------------------------------

    def evaluate(self, x):
        caps = self.capabilities
        if caps.has_evaluate:
            return self._user_evaluate(x)
        if caps.has_evaluate_with_gradient:
            return self._user_combined(x)[0]
        if self._closure.has_num_functions and self._closure.has_separable_evaluate:
            total = None
            for i in range(self.num_functions()):
                part = self.separable_evaluate(x, i, 1)
                total = part if total is None else total + part
            return total
        self._missing("evaluate")

    def gradient(self, x):
        caps = self.capabilities
        if caps.has_gradient:
            return self._user_gradient(x)
        if caps.has_evaluate_with_gradient:
            return self._user_combined(x)[1]
        if self._closure.has_num_functions and self._closure.has_separable_gradient:
            total = None
            for i in range(self.num_functions()):
                part = self.separable_gradient(x, i, 1)
                total = np.array(part, copy=True) if total is None else total + part
            return total
        self._missing("gradient")

    def evaluate_with_gradient(self, x):
        caps = self.capabilities
        if caps.has_evaluate_with_gradient:
            return self._user_combined(x)
        if caps.has_evaluate and caps.has_gradient:
            objective = self._user_evaluate(x)
            return objective, self._user_gradient(x)
        if self._closure.has_num_functions and self._closure.has_separable_evaluate_with_gradient:
            total = grad = None
            for i in range(self.num_functions()):
                obj, g = self.separable_evaluate_with_gradient(x, i, 1)
                if total is None:
                    total, grad = obj, np.array(g, copy=True)
                else:
                    total = total + obj
                    grad = grad + g
            return total, grad
        if self._closure.has_evaluate and self._closure.has_gradient:
            objective = self.evaluate(x)
            return objective, self.gradient(x)
        self._missing("evaluate_with_gradient")

    # -- partially differentiable -----------------------------------------

    def num_features(self) -> int:
        if not self.capabilities.has_num_features:
            self._missing("num_features")
        return int(self.inner.num_features())

    def partial_gradient(self, x, j: int):
        if not self.capabilities.has_partial_gradient:
            self._missing("partial_gradient")
        self.gradients += 1
        return self.inner.partial_gradient(x, j)

    # -- constrained ------------------------------------------------------

    def num_constraints(self) -> int:
        if not self.capabilities.has_constraints:
            self._missing("num_constraints")
        return int(self.inner.num_constraints())

    def evaluate_constraint(self, i: int, x):
        if not self.capabilities.has_constraints:
            self._missing("evaluate_constraint")
        self.constraint_evaluations += 1
        return self.inner.evaluate_constraint(i, x)

    def gradient_constraint(self, i: int, x):
        if not self.capabilities.has_constraints:
            self._missing("gradient_constraint")
        self.constraint_gradients += 1
        return self.inner.gradient_constraint(i, x)

    # -- misc -------------------------------------------------------------

    def categorical_info(self):
        if not self.capabilities.has_categorical_info:
            self._missing("categorical_info")
        return self.inner.categorical_info()

    def get_initial_point(self):
        if not self.capabilities.has_initial_point:
            self._missing("get_initial_point")
        return self.inner.get_initial_point()


def wrap_full_function(function) -> FullFunction:
    return function if isinstance(function, FullFunction) else FullFunction(function)


def _runs(parts):
    """Split a sequence of part indices into ``(begin, length)`` ascending runs."""
    parts = [int(p) for p in parts]
    if not parts:
        return []
    runs = []
    begin = prev = parts[0]
    for p in parts[1:]:
        if p == prev + 1:
            prev = p
            continue
        runs.append((begin, prev - begin + 1))
        begin = prev = p
    runs.append((begin, prev - begin + 1))
    return runs


class _Restricted:
    def __init__(self, function, names):
        self._function = function
        self._names = frozenset(names)

    def __getattr__(self, name):
        if name.startswith("_") or name not in self._names:
            raise AttributeError(name)
        return getattr(self._function, name)

    def __repr__(self):
        return f"expose({self._function!r}, {sorted(self._names)})"


def expose(function, *names: str):
    """View of ``function`` that only offers the listed methods.

    Handy for running the same objective with different capability sets, e.g.
    ``expose(f, "evaluate", "gradient")`` versus
    ``expose(f, "evaluate_with_gradient")``.
    """
    return _Restricted(function, names)
