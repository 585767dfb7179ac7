"""Online gradient descent with Barzilai-Borwein step sizes, plus regret analysis."""

from .errors import (
    ConfigError,
    DegenerateSecant,
    InsufficientData,
    InvalidArgument,
    NumericalFailure,
)
from .geometry import Ball, Box, FeasibleSet
from .learner import Trajectory, aggregate_loss, run
from .losses import (
    DriftingCenter,
    LossSequence,
    QuadraticLoss,
    RandomRotation,
    Stationary,
    max_gradient_norm,
    sequence_lipschitz,
)
from .regret import (
    RegretReport,
    hindsight_minimizer,
    linearized_regret,
    regret_report,
    static_regret,
    sublinearity_slope,
    theorem1_diagnostics,
    theorem2_bound,
    zinkevich_bound,
)
from .steppers import SecantPair, StepPolicy, bb1, bb2

__version__ = "0.1.0"
