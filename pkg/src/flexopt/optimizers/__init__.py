from .augmented_lagrangian import (
    AugmentedLagrangian,
    augmented_lagrangian,
    augmented_lagrangian_value,
    update_multipliers,
)
from .base import OptimizationReport, Optimizer, Termination
from .coordinate_descent import CoordinateDescent, Selection, coordinate_descent
from .gradient_descent import GradientDescent, gradient_descent
from .grid_search import GridSearch, grid_search
from .lbfgs import LBFGS, LineSearchResult, lbfgs, strong_wolfe_line_search, two_loop_direction
from .sgd import (
    SGD,
    SMORMS3,
    AdaDelta,
    AdaDeltaUpdate,
    AdaGrad,
    AdaGradUpdate,
    AdaMax,
    AdaMaxUpdate,
    Adam,
    AdamUpdate,
    MomentumSGD,
    MomentumUpdate,
    NesterovMomentumSGD,
    NesterovMomentumUpdate,
    RMSProp,
    RMSPropUpdate,
    SMORMS3Update,
    StandardSGD,
    UpdatePolicy,
    VanillaUpdate,
    sgd,
)
from .simulated_annealing import (
    ExponentialSchedule,
    SimulatedAnnealing,
    metropolis_accept,
    simulated_annealing,
)
