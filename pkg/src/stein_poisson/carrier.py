"""Carrier spaces, configurations and matching metrics.

A configuration is a finite multiset of carrier points. Two configurations
are compared with

* ``rho1``: the average optimal matching cost when both have the same number
  of points, 1 when the counts differ and 0 when both are empty;
* ``d1_prime``: the unbalanced matching metric: optimal injective matching
  of the smaller configuration into the larger plus the count difference.

Both reduce to exact optimal assignment problems, solved with
:func:`scipy.optimize.linear_sum_assignment`. Exhaustive-permutation oracles
are provided for up to :data:`BRUTE_FORCE_LIMIT` points.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .errors import DomainError, ResourceLimitError

Point = Any
"""A carrier point: ``float`` (interval), ``tuple[float, ...]`` (cube), ``int``
(finite atom index) or ``(label, base point)`` (lifted space)."""

BRUTE_FORCE_LIMIT = 6
TIE_TOLERANCE = 1e-12


# ---------------------------------------------------------------------------
# Configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    """Finite multiset of carrier points.

    Points are kept in sorted order, so equality and hashing ignore the order
    in which points were supplied.
    """

    points: tuple[Point, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(sorted(self.points)))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __add__(self, other: Configuration) -> Configuration:
        return Configuration(self.points + other.points)

    @property
    def total_mass(self) -> int:
        """|ξ|, the number of points counted with multiplicity."""
        return len(self.points)

    def add(self, x: Point) -> Configuration:
        """Return ξ + δ_x."""
        return Configuration((*self.points, x))

    def remove(self, x: Point) -> Configuration:
        """Return ξ − δ_x.

        Raises:
            DomainError: If ``x`` is not a point of the configuration.
        """
        points = list(self.points)
        try:
            points.remove(x)
        except ValueError:
            raise DomainError(f"point {x!r} is not in the configuration") from None
        return Configuration(tuple(points))

    def restrict(self, keep: Callable[[Point], bool]) -> Configuration:
        """Return ξ|_B where B = {x : keep(x)}."""
        return Configuration(tuple(x for x in self.points if keep(x)))

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> Configuration:
        """Point list for a count vector over finite atoms ``0..k-1``."""
        points: list[int] = []
        for atom, count in enumerate(counts):
            if count < 0:
                raise DomainError(f"negative count {count} at atom {atom}")
            points.extend([atom] * int(count))
        return cls(tuple(points))

    def counts(self, atoms: int) -> tuple[int, ...]:
        """Count vector of a configuration of finite atom indices."""
        vector = [0] * atoms
        for x in self.points:
            vector[int(x)] += 1
        return tuple(vector)


# ---------------------------------------------------------------------------
# Carrier spaces
# ---------------------------------------------------------------------------


class CarrierSpace(ABC):
    """A carrier set with a (pseudo-)metric bounded by 1."""

    @abstractmethod
    def distance(self, x: Point, y: Point) -> float:
        """d₀(x, y) (or ρ₀ for lifted spaces)."""

    @abstractmethod
    def sample_point(self, rng: np.random.Generator) -> Point:
        """Draw a point, used for random metric-axiom checks."""

    def cost_matrix(self, xs: Sequence[Point], ys: Sequence[Point]) -> np.ndarray:
        """Matrix of pairwise distances, rows indexed by ``xs``."""
        out = np.empty((len(xs), len(ys)))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                out[i, j] = self.distance(x, y)
        return out

    def to_finite(self) -> FiniteAtoms:
        """Finite-atom view of the space, for the exact engine."""
        raise DomainError(f"{type(self).__name__} is not a finite carrier")


@dataclass(frozen=True)
class Interval(CarrierSpace):
    """Γ = [0, 1] with d₀(x, y) = min(|x − y|, 1)."""

    def distance(self, x: Point, y: Point) -> float:
        return min(abs(float(x) - float(y)), 1.0)

    def cost_matrix(self, xs: Sequence[Point], ys: Sequence[Point]) -> np.ndarray:
        a = np.asarray(xs, dtype=float).reshape(-1, 1)
        b = np.asarray(ys, dtype=float).reshape(1, -1)
        return np.minimum(np.abs(a - b), 1.0)

    def sample_point(self, rng: np.random.Generator) -> float:
        return float(rng.random())


@dataclass(frozen=True)
class Cube(CarrierSpace):
    """Γ = [0, 1]^d with d₀ = min(Euclidean distance, 1)."""

    dimension: int

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise DomainError(f"dimension must be >= 1, got {self.dimension}")

    def distance(self, x: Point, y: Point) -> float:
        return min(math.dist(x, y), 1.0)

    def cost_matrix(self, xs: Sequence[Point], ys: Sequence[Point]) -> np.ndarray:
        if not xs or not ys:
            return np.zeros((len(xs), len(ys)))
        a = np.asarray(xs, dtype=float).reshape(len(xs), self.dimension)
        b = np.asarray(ys, dtype=float).reshape(len(ys), self.dimension)
        return np.minimum(cdist(a, b), 1.0)

    def sample_point(self, rng: np.random.Generator) -> tuple[float, ...]:
        return tuple(float(v) for v in rng.random(self.dimension))


@dataclass(frozen=True, eq=False)
class FiniteAtoms(CarrierSpace):
    """k atoms with an explicit symmetric distance matrix valued in [0, 1].

    Attributes:
        distances: k×k matrix, zero diagonal. Off-diagonal zeros are allowed,
            which makes the matrix a pseudo-metric.
        labels: Display names of the atoms.
        component_of: For flattened lifted spaces, the label (component) each
            atom belongs to; ``None`` otherwise.
    """

    distances: np.ndarray
    labels: tuple[str, ...] = ()
    component_of: tuple[int, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        matrix = np.array(self.distances, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DomainError(f"distance matrix must be square, got shape {matrix.shape}")
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-15):
            raise DomainError("distance matrix must be symmetric")
        if np.any(np.diag(matrix) != 0.0):
            raise DomainError("distance matrix must have a zero diagonal")
        if np.any(matrix < 0.0) or np.any(matrix > 1.0):
            raise DomainError("distances must lie in [0, 1]")
        matrix.setflags(write=False)
        object.__setattr__(self, "distances", matrix)
        k = matrix.shape[0]
        labels = tuple(self.labels) if self.labels else tuple(f"a{i}" for i in range(k))
        if len(labels) != k:
            raise DomainError(f"{len(labels)} labels for {k} atoms")
        object.__setattr__(self, "labels", labels)
        if self.component_of is not None and len(self.component_of) != k:
            raise DomainError("component_of must name one component per atom")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteAtoms):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.component_of == other.component_of
            and np.array_equal(self.distances, other.distances)
        )

    def __hash__(self) -> int:
        return hash((self.labels, self.component_of, self.distances.tobytes()))

    @property
    def size(self) -> int:
        """Number of atoms k."""
        return int(self.distances.shape[0])

    def distance(self, x: Point, y: Point) -> float:
        return float(self.distances[int(x), int(y)])

    def cost_matrix(self, xs: Sequence[Point], ys: Sequence[Point]) -> np.ndarray:
        rows = np.asarray(xs, dtype=int)
        cols = np.asarray(ys, dtype=int)
        return self.distances[np.ix_(rows, cols)]

    def sample_point(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.size))

    def to_finite(self) -> FiniteAtoms:
        return self

    @classmethod
    def discrete(cls, k: int) -> FiniteAtoms:
        """k atoms, all pairwise distances 1."""
        return cls(np.ones((k, k)) - np.eye(k))

    @classmethod
    def from_points(
        cls, points: Sequence[Point], base: CarrierSpace, labels: Sequence[str] = ()
    ) -> FiniteAtoms:
        """Finite carrier made of ``points`` of ``base``, inheriting its metric."""
        matrix = base.cost_matrix(list(points), list(points))
        np.fill_diagonal(matrix, 0.0)
        return cls((matrix + matrix.T) / 2.0, tuple(labels))


def slot_carrier(slots: int) -> FiniteAtoms:
    """Carrier of ``slots`` time slots; slot t (1-based) sits at t / slots in [0, 1]."""
    positions = [t / slots for t in range(1, slots + 1)]
    return FiniteAtoms.from_points(positions, Interval(), [f"t{t}" for t in range(1, slots + 1)])


@dataclass(frozen=True)
class Lifted(CarrierSpace):
    """Γ′ = {0..n−1} × Γ with ρ₀((i, s), (j, t)) = d₀(s, t).

    Labels are ignored by the metric, so ρ₀ is only a pseudo-metric, but a
    marked process lifted to Γ′ is always simple.
    """

    labels: int
    base: CarrierSpace

    def distance(self, x: Point, y: Point) -> float:
        return self.base.distance(x[1], y[1])

    def cost_matrix(self, xs: Sequence[Point], ys: Sequence[Point]) -> np.ndarray:
        return self.base.cost_matrix([x[1] for x in xs], [y[1] for y in ys])

    def sample_point(self, rng: np.random.Generator) -> tuple[int, Point]:
        return (int(rng.integers(self.labels)), self.base.sample_point(rng))

    def project(self, configuration: Configuration) -> Configuration:
        """Drop labels: the configuration on the base space."""
        return Configuration(tuple(x[1] for x in configuration.points))

    def to_finite(self) -> FiniteAtoms:
        """Flatten to atoms (label, base atom), label-major.

        Atom ``label * k + a`` is the pair (label, a) for a base of k atoms.
        """
        base = self.base.to_finite()
        k = base.size
        matrix = np.tile(base.distances, (self.labels, self.labels))
        labels = tuple(f"{i}:{name}" for i in range(self.labels) for name in base.labels)
        components = tuple(i for i in range(self.labels) for _ in range(k))
        return FiniteAtoms(matrix, labels, components)


# ---------------------------------------------------------------------------
# Assignment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Assignment:
    """Optimal injective matching of columns into rows.

    Attributes:
        cost: Total cost (correctly rounded sum of the matched entries).
        matching: ``matching[j]`` is the row matched to column ``j``.
    """

    cost: float
    matching: tuple[int, ...]


def _validate_cost(cost: np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
    matrix = np.asarray(cost, dtype=float)
    if matrix.size == 0:
        return matrix.reshape(matrix.shape if matrix.ndim == 2 else (0, 0))
    if matrix.ndim != 2:
        raise DomainError(f"cost must be a matrix, got {matrix.ndim} dimensions")
    if matrix.shape[0] < matrix.shape[1]:
        raise DomainError(f"cost must have at least as many rows as columns: {matrix.shape}")
    if not np.all(np.isfinite(matrix)) or np.any(matrix < 0.0):
        raise DomainError("costs must be finite and nonnegative")
    return matrix


def _matched_total(cost: np.ndarray, matching: Sequence[int]) -> float:
    return math.fsum(float(cost[row, col]) for col, row in enumerate(matching))


def assignment_cost(cost: np.ndarray) -> float:
    """Optimal assignment value only; no tie-breaking work."""
    if cost.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(cost)
    return math.fsum(float(v) for v in cost[rows, cols])


def min_cost_assignment(cost: np.ndarray | Sequence[Sequence[float]]) -> Assignment:
    """Globally minimal injective matching of the columns of ``cost`` into its rows.

    Among optimal matchings the lexicographically smallest ``matching`` tuple
    is returned, so results do not depend on solver internals.

    Args:
        cost: m×n matrix with m ≥ n, finite nonnegative entries.

    Returns:
        The optimal :class:`Assignment`; an empty matrix gives cost 0 and an
        empty matching.

    Raises:
        DomainError: On negative or non-finite costs, or m < n.

    Examples:
        >>> min_cost_assignment([[0.0, 1.0], [1.0, 0.0]])
        Assignment(cost=0.0, matching=(0, 1))
    """
    matrix = _validate_cost(cost)
    if matrix.size == 0:
        return Assignment(0.0, ())
    m, n = matrix.shape
    optimum = assignment_cost(matrix)
    slack = TIE_TOLERANCE * max(1.0, optimum)

    used: set[int] = set()
    matching: list[int] = []
    committed = 0.0
    for col in range(n):
        rest = list(range(col + 1, n))
        for row in range(m):
            if row in used:
                continue
            free = [r for r in range(m) if r not in used and r != row]
            completion = assignment_cost(matrix[np.ix_(free, rest)]) if rest else 0.0
            if committed + matrix[row, col] + completion <= optimum + slack:
                matching.append(row)
                used.add(row)
                committed += float(matrix[row, col])
                break
    return Assignment(_matched_total(matrix, matching), tuple(matching))


def brute_force_assignment(cost: np.ndarray | Sequence[Sequence[float]]) -> Assignment:
    """Exhaustive-permutation oracle for :func:`min_cost_assignment`.

    Raises:
        ResourceLimitError: With more than :data:`BRUTE_FORCE_LIMIT` rows.
    """
    matrix = _validate_cost(cost)
    if matrix.size == 0:
        return Assignment(0.0, ())
    m, n = matrix.shape
    if m > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"brute force limited to {BRUTE_FORCE_LIMIT} points, got {m}")
    candidates = [
        (_matched_total(matrix, perm), perm) for perm in itertools.permutations(range(m), n)
    ]
    best = min(total for total, _ in candidates)
    slack = TIE_TOLERANCE * max(1.0, best)
    for total, perm in candidates:
        if total <= best + slack:
            return Assignment(total, tuple(perm))
    raise AssertionError("unreachable: the minimum is always a candidate")


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def rho1(xi1: Configuration, xi2: Configuration, space: CarrierSpace) -> float:
    """ρ₁(ξ₁, ξ₂): average optimal matching distance, 1 if the counts differ.

    Examples:
        >>> rho1(Configuration((0.5, 0.25)), Configuration((0.75, 0.25)), Interval())
        0.125
    """
    m = len(xi1)
    if m != len(xi2):
        return 1.0
    if m == 0:
        return 0.0
    return assignment_cost(space.cost_matrix(xi1.points, xi2.points)) / m


def d1_prime(xi1: Configuration, xi2: Configuration, space: CarrierSpace) -> float:
    """d′₁(ξ₁, ξ₂): optimal injection of the smaller into the larger plus (m − n)."""
    small, large = (xi1, xi2) if len(xi1) <= len(xi2) else (xi2, xi1)
    n, m = len(small), len(large)
    if n == 0:
        return float(m)
    return assignment_cost(space.cost_matrix(large.points, small.points)) + (m - n)


def brute_force_rho1(xi1: Configuration, xi2: Configuration, space: CarrierSpace) -> float:
    """Permutation-enumeration oracle for :func:`rho1`."""
    m = len(xi1)
    if m != len(xi2):
        return 1.0
    if m == 0:
        return 0.0
    return brute_force_assignment(space.cost_matrix(xi1.points, xi2.points)).cost / m


def brute_force_d1_prime(xi1: Configuration, xi2: Configuration, space: CarrierSpace) -> float:
    """Injection-enumeration oracle for :func:`d1_prime`."""
    small, large = (xi1, xi2) if len(xi1) <= len(xi2) else (xi2, xi1)
    n, m = len(small), len(large)
    if n == 0:
        if m > BRUTE_FORCE_LIMIT:
            raise ResourceLimitError(f"brute force limited to {BRUTE_FORCE_LIMIT} points")
        return float(m)
    cost = space.cost_matrix(large.points, small.points)
    return brute_force_assignment(cost).cost + (m - n)


def random_configuration(
    space: CarrierSpace, rng: np.random.Generator, max_points: int
) -> Configuration:
    """Configuration with a uniform count in ``0..max_points`` of random points."""
    size = int(rng.integers(max_points + 1))
    return Configuration(tuple(space.sample_point(rng) for _ in range(size)))


def pairwise_rho1(
    configurations: Iterable[Configuration], space: CarrierSpace
) -> np.ndarray:
    """ρ₁ matrix over a list of configurations."""
    items = list(configurations)
    out = np.zeros((len(items), len(items)))
    for i, j in itertools.combinations(range(len(items)), 2):
        out[i, j] = out[j, i] = rho1(items[i], items[j], space)
    return out
