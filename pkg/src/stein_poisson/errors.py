"""Exception hierarchy for stein_poisson.

Every error raised on purpose by the library derives from
:class:`SteinPoissonError`, so callers can catch the whole family at once.
Invalid *bounds* (non-positive denominators and the like) are not errors:
they come back as :class:`~stein_poisson.bounds.BoundReport` values with
``valid=False``.
"""

from __future__ import annotations


class SteinPoissonError(Exception):
    """Base class for all stein_poisson errors."""


class DomainError(SteinPoissonError, ValueError):
    """An argument lies outside the domain of the operation.

    Examples are a negative Poisson rate, ``w = 0`` for the probabilistic
    Stein solution, or a density whose declared supremum is not finite.
    """


class PalmUndefinedError(DomainError):
    """Palm distribution requested at an atom with zero intensity.

    Palm distributions are only defined intensity-almost-surely, so an atom
    that carries no mean mass has no Palm law.
    """

    def __init__(self, atom: int) -> None:
        super().__init__(f"Palm distribution undefined at atom {atom}: intensity is zero")
        self.atom = atom


class ResourceLimitError(SteinPoissonError):
    """An enumeration or simulation cap was exceeded."""


class ConfigurationError(SteinPoissonError):
    """Invalid experiment configuration.

    Attributes:
        field_path: Dotted path of the offending field (``"monte_carlo.reps"``),
            or an empty string when the problem is with the document as a whole.
        message: Human readable description of the problem.
    """

    def __init__(self, field_path: str, message: str) -> None:
        self.field_path = field_path
        self.message = message
        where = f"{field_path}: " if field_path else ""
        super().__init__(f"{where}{message}")
