"""Machine unlearning toolkit: smoothed-label gradient methods, influence
updates, theory verifiers, label-LDP accounting, and an evaluation suite."""

__version__ = "0.1.0"

from . import (  # noqa: F401
    config,
    data,
    influence,
    metrics,
    models,
    numcore,
    privacy,
    smoothing,
    unlearn,
)
from .errors import (  # noqa: F401
    ConfigError,
    DimensionError,
    DomainError,
    SolverError,
    StratificationError,
    UnlearnForgeError,
    UnsupportedModelError,
)
