"""flexopt: objective functions declare what they can do, optimizers take it from there."""
from .callbacks import (
    CallbackDecision,
    EarlyStopAtMinLoss,
    PrintLoss,
    ProgressBar,
    StoreBestCoordinates,
    dispatch,
)
from .function import (
    CapabilityError,
    CapabilitySet,
    FullFunction,
    FunctionClass,
    check_requirements,
    classify,
    detect_capabilities,
    expose,
    wrap_full_function,
)
from .numerics import (
    ElementTypeRequirement,
    TypeCheckError,
    finite_difference_gradient,
    require,
    set_type_checks,
)
from .optimizers import *  # noqa: F401,F403

__version__ = "0.1.0"
