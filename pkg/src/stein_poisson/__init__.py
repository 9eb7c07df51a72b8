"""stein_poisson - Stein's method for Poisson and Poisson process approximation."""

from ._version import __version__
from .bounds import (
    BoundReport,
    bound_corollary52,
    bound_corollary53,
    bound_eq7,
    bound_theorem41,
    bound_theorem51,
    matern_scaling_study,
)
from .carrier import Configuration, Cube, FiniteAtoms, Interval, Lifted, d1_prime, rho1
from .errors import (
    ConfigurationError,
    DomainError,
    PalmUndefinedError,
    ResourceLimitError,
    SteinPoissonError,
)
from .logging import get_logger, setup_logging
from .palmexact import ConfigDistribution, exact_d2, palm, reduced_palm
from .univariate import BernoulliVector, stein_solution_probabilistic, stein_solution_recursive

__all__ = [
    "BernoulliVector",
    "BoundReport",
    "ConfigDistribution",
    "Configuration",
    "ConfigurationError",
    "Cube",
    "DomainError",
    "FiniteAtoms",
    "Interval",
    "Lifted",
    "PalmUndefinedError",
    "ResourceLimitError",
    "SteinPoissonError",
    "__version__",
    "bound_corollary52",
    "bound_corollary53",
    "bound_eq7",
    "bound_theorem41",
    "bound_theorem51",
    "d1_prime",
    "exact_d2",
    "get_logger",
    "matern_scaling_study",
    "palm",
    "reduced_palm",
    "rho1",
    "setup_logging",
    "stein_solution_probabilistic",
    "stein_solution_recursive",
]
