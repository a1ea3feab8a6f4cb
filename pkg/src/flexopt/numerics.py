"""Coordinate element-type checks and a finite-difference gradient oracle.

Coordinates are plain numpy arrays of any shape whose dtype is float32,
float64 or a machine integer.  Optimizers call :func:`require` at the top of
``optimize`` to reject element types they are not known to work with.
"""
from __future__ import annotations

import enum
import os
import warnings
from typing import Callable

import numpy as np

ENV_DISABLE_TYPE_CHECKS = "FLEXOPT_DISABLE_TYPE_CHECKS"

_type_checks_enabled = os.environ.get(ENV_DISABLE_TYPE_CHECKS, "").lower() not in (
    "1",
    "true",
    "yes",
    "on",
)


class TypeCheckError(TypeError):
    """Raised when coordinates or gradients have unsupported element types."""


class TypeCheckWarning(UserWarning):
    pass


class ElementTypeRequirement(enum.Enum):
    FLOATING_POINT = "FloatingPoint"
    SAME_INTERNAL_TYPES = "SameInternalTypes"
    DENSE_FLOATING_POINT = "DenseFloatingPoint"


def set_type_checks(enabled: bool) -> None:
    """Turn element-type checks on or off globally.

    With checks off, failed requirements emit a :class:`TypeCheckWarning`
    instead of raising.  The same switch is available through the
    ``FLEXOPT_DISABLE_TYPE_CHECKS`` environment variable at import time.
    """
    global _type_checks_enabled
    _type_checks_enabled = bool(enabled)


def type_checks_enabled() -> bool:
    return _type_checks_enabled


def _dtype_of(obj) -> np.dtype:
    if isinstance(obj, np.dtype):
        return obj
    if isinstance(obj, type) and issubclass(obj, np.generic):
        return np.dtype(obj)
    if hasattr(obj, "dtype"):
        return np.dtype(obj.dtype)
    return np.dtype(obj)


def is_floating(obj) -> bool:
    return _dtype_of(obj) in (np.dtype(np.float32), np.dtype(np.float64))


def _is_dense(obj) -> bool:
    # Anything that is not an ndarray (scipy.sparse, lists of parts, ...) fails.
    return isinstance(obj, np.ndarray) or isinstance(obj, (np.dtype, type))


_ESCAPE = (
    "If you would like to try anyway, set {env}=1 or call "
    "flexopt.numerics.set_type_checks(False).  However, you get to pick up all "
    "the pieces if there is a failure!"
).format(env=ENV_DISABLE_TYPE_CHECKS)


def check(req: ElementTypeRequirement, *types) -> str | None:
    """Return ``None`` if ``req`` holds for ``types``, else the diagnostic text."""
    req = ElementTypeRequirement(req)
    if req is ElementTypeRequirement.SAME_INTERNAL_TYPES:
        if len(types) < 2:
            raise ValueError("SameInternalTypes needs at least two types")
        dtypes = [_dtype_of(t) for t in types]
        if len(set(dtypes)) == 1:
            return None
        names = ", ".join(d.name for d in dtypes)
        return (
            f"The internal element types of the given coordinates and gradient "
            f"({names}) must be identical, or it is not known to work!  " + _ESCAPE
        )
    if len(types) != 1:
        raise ValueError(f"{req.value} takes exactly one type")
    (obj,) = types
    if req is ElementTypeRequirement.DENSE_FLOATING_POINT and not _is_dense(obj):
        return (
            f"The coordinates must be stored densely; got {type(obj).__name__}.  "
            + _ESCAPE
        )
    dtype = _dtype_of(obj)
    if not is_floating(dtype):
        return (
            f"The element type of the coordinates must be either float32 or "
            f"float64; got {dtype.name}.  " + _ESCAPE
        )
    return None


def require(req: ElementTypeRequirement, *types) -> None:
    """Raise :class:`TypeCheckError` if ``req`` fails (warn if checks are off)."""
    message = check(req, *types)
    if message is None:
        return
    if _type_checks_enabled:
        raise TypeCheckError(message)
    warnings.warn(message, TypeCheckWarning, stacklevel=2)


def finite_difference_gradient(
    evaluate: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-6
) -> np.ndarray:
    """Central-difference gradient of ``evaluate`` at ``x``; ``x`` is not mutated."""
    if h <= 0:
        raise ValueError("h must be positive")
    require(ElementTypeRequirement.FLOATING_POINT, x)
    x = np.asarray(x)
    probe = x.copy()
    grad = np.empty_like(x)
    flat_probe = probe.reshape(-1)
    flat_grad = grad.reshape(-1)
    for j in range(flat_probe.size):
        orig = flat_probe[j]
        flat_probe[j] = orig + h
        f_plus = evaluate(probe)
        flat_probe[j] = orig - h
        f_minus = evaluate(probe)
        flat_probe[j] = orig
        flat_grad[j] = (f_plus - f_minus) / (2 * h)
    return grad


def relative_error(a, b, floor: float = 1e-12) -> float:
    """Max-norm relative error ``|a - b| / max(|b|, floor)``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), floor))
