"""Monte Carlo estimates with standard errors and truncation bounds."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample mean of independent replications.

    Attributes:
        estimate: Sample mean.
        standard_error: Sample standard deviation divided by √replications
            (0 for a single replication).
        truncation_bound: Deterministic bias bound from truncating a time
            integral (0 when nothing was truncated).
        replications: Number of replications averaged.
    """

    estimate: float
    standard_error: float
    truncation_bound: float = 0.0
    replications: int = 0

    def within(self, target: float, n_se: float = 3.0, slack: float = 0.0) -> bool:
        """Whether ``target`` lies within ``n_se`` standard errors plus truncation and slack."""
        margin = n_se * self.standard_error + self.truncation_bound + slack
        return abs(self.estimate - target) <= margin

    def __add__(self, other: MonteCarloEstimate) -> MonteCarloEstimate:
        """Sum of two independent estimates; standard errors combine in quadrature."""
        return MonteCarloEstimate(
            self.estimate + other.estimate,
            math.hypot(self.standard_error, other.standard_error),
            self.truncation_bound + other.truncation_bound,
            min(self.replications, other.replications),
        )

    def scaled(self, factor: float) -> MonteCarloEstimate:
        """Estimate of ``factor`` times the target."""
        return MonteCarloEstimate(
            factor * self.estimate,
            abs(factor) * self.standard_error,
            abs(factor) * self.truncation_bound,
            self.replications,
        )


def summarize(
    values: Iterable[float] | np.ndarray, truncation_bound: float = 0.0
) -> MonteCarloEstimate:
    """Mean and standard error of replication values.

    Raises:
        DomainError: If no values are given.
    """
    data = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    n = data.size
    if n == 0:
        raise DomainError("cannot summarize zero replications")
    mean = float(math.fsum(data) / n)
    se = float(np.std(data, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MonteCarloEstimate(mean, se, truncation_bound, n)


def constant(value: float) -> MonteCarloEstimate:
    """A known value dressed as an estimate with zero error."""
    return MonteCarloEstimate(float(value), 0.0, 0.0, 0)
