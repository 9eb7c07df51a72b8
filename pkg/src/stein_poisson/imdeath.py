"""Spatial immigration-death processes and the Stein solution they define.

The process Z_ξ(t) starts from ξ, gains points at rate λ(dx) and loses each
point at unit rate; its stationary law is Po(λ). The solution of the Stein
equation for a test function h is

    g_h(ξ) = −∫₀^∞ E[h(Z_ξ(t)) − Po(λ)(h)] dt,

and differences of g_h are estimated here with coupled paths: every path
shares the immigrants and the lifetimes of common points, and an extra point
carries its own Exp(1) lifetime. Paths are piecewise constant, so the time
integrals are exact between events.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from typing import Literal, Protocol

import numpy as np

from .carrier import CarrierSpace, Configuration, Cube, FiniteAtoms, Interval, Point, rho1
from .errors import DomainError, ResourceLimitError
from .logging import get_logger, log_fields
from .montecarlo import MonteCarloEstimate, constant, summarize
from .rng import SeedLike, as_generator, replication_chunks, spawn, spawn_generator

logger = get_logger(__name__)

DEFAULT_T_STAR = 30.0
MAX_REJECTIONS = 1_000_000


# ---------------------------------------------------------------------------
# Intensities
# ---------------------------------------------------------------------------


class SpatialIntensity(ABC):
    """Finite intensity measure λ on a carrier, total mass λ."""

    space: CarrierSpace

    @property
    @abstractmethod
    def total_mass(self) -> float:
        """λ = λ(Γ)."""

    @abstractmethod
    def sample_location(self, rng: np.random.Generator) -> Point:
        """Draw a point from λ / λ."""


@dataclass(frozen=True, eq=False)
class DiscreteIntensity(SpatialIntensity):
    """Masses on finitely many points of ``space``."""

    space: CarrierSpace
    atoms: tuple[Point, ...]
    masses: tuple[float, ...]

    def __post_init__(self) -> None:
        masses = tuple(float(m) for m in self.masses)
        if len(masses) != len(self.atoms):
            raise DomainError(f"{len(masses)} masses for {len(self.atoms)} atoms")
        if any(not math.isfinite(m) or m < 0.0 for m in masses):
            raise DomainError("masses must be finite and nonnegative")
        object.__setattr__(self, "masses", masses)

    @classmethod
    def on_atoms(cls, carrier: FiniteAtoms, masses: Sequence[float]) -> DiscreteIntensity:
        """Mass ``masses[a]`` on every atom a of a finite carrier."""
        return cls(carrier, tuple(range(carrier.size)), tuple(masses))

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    def sample_location(self, rng: np.random.Generator) -> Point:
        weights = np.asarray(self.masses) / self.total_mass
        return self.atoms[int(rng.choice(len(self.atoms), p=weights))]


@dataclass(frozen=True, eq=False)
class DensityIntensity(SpatialIntensity):
    """Density on [0, 1]^d with a declared supremum, sampled by rejection.

    Attributes:
        dimension: d.
        density: Function of a length-d array.
        supremum: Upper bound of the density used as the rejection envelope.
        mass: ∫ density, as declared by the caller (see :meth:`validate`).
    """

    dimension: int
    density: Callable[[np.ndarray], float]
    supremum: float
    mass: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.supremum) or self.supremum < 0.0:
            raise DomainError(f"density supremum must be finite, got {self.supremum}")
        if not math.isfinite(self.mass) or self.mass < 0.0:
            raise DomainError(f"total mass must be finite and nonnegative, got {self.mass}")

    @property
    def space(self) -> CarrierSpace:  # type: ignore[override]
        return Interval() if self.dimension == 1 else Cube(self.dimension)

    @classmethod
    def uniform(cls, dimension: int, mass: float) -> DensityIntensity:
        """Constant density ``mass`` on the unit cube."""
        return cls(dimension, lambda _x: mass, mass, mass)

    @property
    def total_mass(self) -> float:
        return self.mass

    def _point(self, u: np.ndarray) -> Point:
        return float(u[0]) if self.dimension == 1 else tuple(float(v) for v in u)

    def sample_location(self, rng: np.random.Generator) -> Point:
        for _ in range(MAX_REJECTIONS):
            u = rng.random(self.dimension)
            value = self.density(u)
            if value > self.supremum * (1.0 + 1e-12):
                raise DomainError(f"density {value} exceeds the declared supremum {self.supremum}")
            if rng.random() * self.supremum < value:
                return self._point(u)
        raise ResourceLimitError("rejection sampler did not accept a point")

    def validate(self, reps: int, seed: SeedLike) -> MonteCarloEstimate:
        """Monte Carlo estimate of ∫ density, to compare with the declared mass."""
        rng = as_generator(seed)
        values = [self.density(rng.random(self.dimension)) for _ in range(reps)]
        return summarize(values)


def sample_poisson_process(intensity: SpatialIntensity, seed: SeedLike) -> Configuration:
    """Po(λ): a Po(λ) count of i.i.d. λ / λ locations."""
    rng = as_generator(seed)
    total = intensity.total_mass
    if total == 0.0:
        return Configuration()
    count = int(rng.poisson(total))
    return Configuration(tuple(intensity.sample_location(rng) for _ in range(count)))


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    """One jump of an immigration-death path.

    Attributes:
        time: Jump time.
        kind: ``"birth"`` or ``"death"``.
        location: Where the point was born or where the dying point sat.
        index: For deaths, the position of the dying point in the list of live
            points (initial points first, then births in order).
    """

    time: float
    kind: Literal["birth", "death"]
    location: Point
    index: int | None = None


@dataclass(frozen=True)
class Trajectory:
    """Event log of an immigration-death path on [0, horizon]."""

    initial: Configuration
    events: tuple[Event, ...]
    horizon: float

    def __post_init__(self) -> None:
        times = [e.time for e in self.events]
        if any(b <= a for a, b in zip(times, times[1:], strict=False)):
            raise DomainError("event times must be strictly increasing")

    def _replay(self) -> Iterator[tuple[float, list[Point]]]:
        live = list(self.initial.points)
        yield 0.0, live
        for event in self.events:
            if event.kind == "birth":
                live.append(event.location)
            else:
                if event.index is None or not 0 <= event.index < len(live):
                    raise DomainError(f"death at {event.time} references no live point")
                live.pop(event.index)
            yield event.time, live

    def segments(self) -> Iterator[tuple[float, float, Configuration]]:
        """Pieces ``(start, end, state)`` covering [0, horizon]."""
        previous_time, previous = 0.0, Configuration(self.initial.points)
        for time, live in self._replay():
            if time > previous_time:
                yield previous_time, time, previous
            previous_time, previous = time, Configuration(tuple(live))
        yield previous_time, self.horizon, previous

    def state_at(self, t: float) -> Configuration:
        """Z(t)."""
        state = self.initial
        for time, live in self._replay():
            if time > t:
                break
            state = Configuration(tuple(live))
        return state

    @property
    def final(self) -> Configuration:
        """Z(horizon)."""
        return self.state_at(self.horizon)

    def counts(self) -> tuple[int, ...]:
        """|Z| right after each event, starting with |Z(0)|."""
        out = [len(self.initial)]
        for event in self.events:
            out.append(out[-1] + (1 if event.kind == "birth" else -1))
        return tuple(out)


def simulate_spatial_imdeath(
    initial: Configuration, intensity: SpatialIntensity, horizon: float, seed: SeedLike
) -> Trajectory:
    """Event-driven simulation of the spatial immigration-death process.

    Event times and event types use child stream 0 of ``seed`` and locations
    and victims use child stream 1, so the count path coincides with
    :func:`stein_poisson.univariate.simulate_count_imdeath` for the same seed.
    """
    if horizon < 0:
        raise DomainError(f"horizon must be >= 0, got {horizon}")
    clock = spawn_generator(seed, 0)
    marks = spawn_generator(seed, 1)
    lam = intensity.total_mass
    live = list(initial.points)
    events: list[Event] = []
    t = 0.0
    while True:
        rate = lam + len(live)
        if rate == 0.0:
            break
        t += clock.exponential(1.0 / rate)
        if t > horizon:
            break
        if clock.random() * rate < lam:
            location = intensity.sample_location(marks)
            live.append(location)
            events.append(Event(t, "birth", location))
        else:
            index = int(marks.integers(len(live)))
            events.append(Event(t, "death", live.pop(index), index))
    return Trajectory(initial, tuple(events), horizon)


def sample_imdeath_state(
    initial: Configuration, intensity: SpatialIntensity, t: float, seed: SeedLike
) -> Configuration:
    """Draw Z_ξ(t) directly.

    Initial points survive independently with probability e^{−t}; surviving
    immigrants form a Poisson process with intensity (1 − e^{−t}) λ.
    """
    rng = as_generator(seed)
    survival = math.exp(-t)
    kept = [x for x in initial.points if rng.random() < survival]
    count = int(rng.poisson(intensity.total_mass * (1.0 - survival)))
    born = [intensity.sample_location(rng) for _ in range(count)]
    return Configuration(tuple(kept + born))


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------


class LipschitzFunction(Protocol):
    """A member h of the Lipschitz class: |h(ξ₁) − h(ξ₂)| ≤ ρ₁(ξ₁, ξ₂)."""

    def __call__(self, xi: Configuration) -> float: ...


@dataclass(frozen=True)
class AnchorTestFunction:
    """h(ξ) = ρ₁(ξ, ξ₀); Lipschitz by the triangle inequality, valued in [0, 1]."""

    anchor: Configuration
    space: CarrierSpace

    def __call__(self, xi: Configuration) -> float:
        return rho1(xi, self.anchor, self.space)


@dataclass(frozen=True)
class ConstantTestFunction:
    """h ≡ value; every difference of g_h vanishes."""

    value: float = 0.0

    def __call__(self, xi: Configuration) -> float:
        return self.value


@dataclass
class _Memo:
    h: LipschitzFunction
    cache: dict[Configuration, float] = field(default_factory=dict)

    def __call__(self, xi: Configuration) -> float:
        value = self.cache.get(xi)
        if value is None:
            value = self.cache[xi] = self.h(xi)
        return value


# ---------------------------------------------------------------------------
# Coupled estimators
# ---------------------------------------------------------------------------


def _graphical_path(
    initial: Sequence[Point], intensity: SpatialIntensity, horizon: float, rng: np.random.Generator
) -> list[tuple[float, int, Point]]:
    # (time, +1 birth / -1 death, location); initial points get Exp(1) lifetimes,
    # immigrants arrive uniformly on [0, horizon] with Exp(1) lifetimes
    jumps: list[tuple[float, int, Point]] = []
    for point in initial:
        life = rng.exponential()
        if life < horizon:
            jumps.append((life, -1, point))
    arrivals = int(rng.poisson(intensity.total_mass * horizon)) if horizon > 0 else 0
    for _ in range(arrivals):
        born = rng.random() * horizon
        location = intensity.sample_location(rng)
        died = born + rng.exponential()
        jumps.append((born, 1, location))
        if died < horizon:
            jumps.append((died, -1, location))
    jumps.sort(key=lambda j: (j[0], -j[1]))
    return jumps


def _path_segments(
    initial: Sequence[Point], jumps: Sequence[tuple[float, int, Point]], horizon: float
) -> Iterator[tuple[float, float, Configuration]]:
    live = list(initial)
    start = 0.0
    for time, step, location in jumps:
        if time > start:
            yield start, time, Configuration(tuple(live))
            start = time
        if step > 0:
            live.append(location)
        else:
            live.remove(location)
    if horizon > start:
        yield start, horizon, Configuration(tuple(live))


def _first_difference_value(
    h: LipschitzFunction,
    xi: Configuration,
    x: Point,
    intensity: SpatialIntensity,
    t_star: float,
    rng: np.random.Generator,
) -> float:
    horizon = min(rng.exponential(), t_star)
    jumps = _graphical_path(xi.points, intensity, horizon, rng)
    total = math.fsum(
        (h(state.add(x)) - h(state)) * (end - start)
        for start, end, state in _path_segments(xi.points, jumps, horizon)
    )
    return -total


def estimate_gh_difference(
    h: LipschitzFunction,
    xi: Configuration,
    x: Point,
    intensity: SpatialIntensity,
    *,
    reps: int,
    seed: SeedLike,
    t_star: float = DEFAULT_T_STAR,
) -> MonteCarloEstimate:
    """Estimate g_h(ξ + δ_x) − g_h(ξ).

    The two paths differ only while the extra point at x is alive, so each
    replication integrates h(Z + δ_x) − h(Z) over [0, min(τ, T*)] with τ the
    extra point's Exp(1) lifetime. Truncating at T* biases the mean by at most
    e^{−T*} because h takes values in [0, 1].
    """
    if t_star <= 0:
        raise DomainError(f"T* must be positive, got {t_star}")
    if isinstance(h, ConstantTestFunction):
        return MonteCarloEstimate(0.0, 0.0, 0.0, reps)
    memo = _Memo(h)
    values = [
        _first_difference_value(memo, xi, x, intensity, t_star, rng)
        for rng, count in replication_chunks(seed, reps)
        for _ in range(count)
    ]
    estimate = summarize(values, truncation_bound=math.exp(-t_star))
    logger.debug(
        "first difference estimated",
        extra=log_fields(size=len(xi), reps=reps, estimate=estimate.estimate),
    )
    return estimate


def estimate_second_difference(
    h: LipschitzFunction,
    xi: Configuration,
    alpha: Point,
    beta: Point,
    intensity: SpatialIntensity,
    *,
    reps: int,
    seed: SeedLike,
    t_star: float = DEFAULT_T_STAR,
) -> MonteCarloEstimate:
    """Estimate g_h(ξ + δ_α + δ_β) − g_h(ξ + δ_α) − g_h(ξ + δ_β) + g_h(ξ).

    Four coupled paths share immigrants and common lifetimes; α and β carry
    independent Exp(1) lifetimes and the integrand vanishes once either has
    died. The truncation bias is at most e^{−2T*}.
    """
    if t_star <= 0:
        raise DomainError(f"T* must be positive, got {t_star}")
    if isinstance(h, ConstantTestFunction):
        return MonteCarloEstimate(0.0, 0.0, 0.0, reps)
    memo = _Memo(h)
    values = []
    for rng, count in replication_chunks(seed, reps):
        for _ in range(count):
            horizon = min(rng.exponential(), rng.exponential(), t_star)
            jumps = _graphical_path(xi.points, intensity, horizon, rng)
            total = math.fsum(
                (
                    memo(state.add(alpha).add(beta))
                    - memo(state.add(alpha))
                    - memo(state.add(beta))
                    + memo(state)
                )
                * (end - start)
                for start, end, state in _path_segments(xi.points, jumps, horizon)
            )
            values.append(-total)
    return summarize(values, truncation_bound=math.exp(-2.0 * t_star))


def stein_factor_bound(lam: float, size: int) -> float:
    """3.5/λ + 2.5/(|ξ| + 1), the uniform bound on second differences of g_h."""
    if lam <= 0.0:
        raise DomainError(f"the Stein factor needs λ > 0, got {lam}")
    return 3.5 / lam + 2.5 / (size + 1)


@dataclass(frozen=True)
class CoupledTrace:
    """One replication of the first-difference coupling, kept for inspection.

    Attributes:
        base: Path from ξ (the path from ξ + δ_x adds x until it dies).
        extra_lifetime: τ, the lifetime of the point at x.
        pieces: ``(start, end, h(Z + δ_x 1{t < τ}) − h(Z))`` over [0, horizon].
    """

    base: Trajectory
    extra_lifetime: float
    pieces: tuple[tuple[float, float, float], ...]


def coupled_trace(
    h: LipschitzFunction,
    xi: Configuration,
    x: Point,
    intensity: SpatialIntensity,
    horizon: float,
    seed: SeedLike,
) -> CoupledTrace:
    """Run one coupled replication on [0, horizon] and keep the whole path."""
    rng = as_generator(seed)
    tau = float(rng.exponential())
    jumps = _graphical_path(xi.points, intensity, horizon, rng)
    pieces: list[tuple[float, float, float]] = []
    for start, end, state in _path_segments(xi.points, jumps, horizon):
        cuts = [start, end] if not start < tau < end else [start, tau, end]
        for a, b in zip(cuts, cuts[1:], strict=False):
            upper = state.add(x) if a < tau else state
            pieces.append((a, b, h(upper) - h(state)))

    live = list(xi.points)
    events: list[Event] = []
    for time, step, location in jumps:
        if step > 0:
            live.append(location)
            events.append(Event(time, "birth", location))
        else:
            index = live.index(location)
            live.pop(index)
            events.append(Event(time, "death", location, index))
    return CoupledTrace(Trajectory(xi, tuple(events), horizon), tau, tuple(pieces))


# ---------------------------------------------------------------------------
# The Stein equation itself
# ---------------------------------------------------------------------------


def estimate_poisson_expectation(
    h: LipschitzFunction, intensity: SpatialIntensity, *, reps: int, seed: SeedLike
) -> MonteCarloEstimate:
    """Po(λ)(h) by averaging h over Poisson samples."""
    if isinstance(h, ConstantTestFunction):
        return constant(h.value)
    memo = _Memo(h)
    values = [
        memo(sample_poisson_process(intensity, rng))
        for rng, count in replication_chunks(seed, reps)
        for _ in range(count)
    ]
    return summarize(values)


def stein_equation_residual(
    h: LipschitzFunction,
    xi: Configuration,
    intensity: SpatialIntensity,
    *,
    reps: int,
    seed: SeedLike,
    t_star: float = DEFAULT_T_STAR,
) -> MonteCarloEstimate:
    """Estimate 𝒜g_h(ξ) − [h(ξ) − Po(λ)(h)], which is 0 for the true solution.

    The birth part ∫[g_h(ξ + δ_x) − g_h(ξ)]λ(dx) is a finite sum for a
    discrete intensity and a Monte Carlo average over x ~ λ/λ for a density.
    The death part uses g_h(ξ − δ_y) − g_h(ξ) = −[g_h((ξ − δ_y) + δ_y) −
    g_h(ξ − δ_y)]. Every term has its own child stream of ``seed`` and the
    standard errors are combined in quadrature.
    """
    if isinstance(h, ConstantTestFunction):
        return MonteCarloEstimate(0.0, 0.0, 0.0, reps)
    terms: list[MonteCarloEstimate] = []
    stream = 0

    if isinstance(intensity, DiscreteIntensity):
        for atom, mass in zip(intensity.atoms, intensity.masses, strict=True):
            if mass == 0.0:
                continue
            diff = estimate_gh_difference(
                h, xi, atom, intensity, reps=reps, seed=spawn(seed, stream), t_star=t_star
            )
            terms.append(diff.scaled(mass))
            stream += 1
    elif intensity.total_mass > 0.0:
        memo = _Memo(h)
        values = [
            _first_difference_value(
                memo, xi, intensity.sample_location(rng), intensity, t_star, rng
            )
            for rng, count in replication_chunks(spawn(seed, stream), reps)
            for _ in range(count)
        ]
        terms.append(summarize(values, math.exp(-t_star)).scaled(intensity.total_mass))
        stream += 1

    for point in xi.points:
        rest = xi.remove(point)
        diff = estimate_gh_difference(
            h, rest, point, intensity, reps=reps, seed=spawn(seed, stream), t_star=t_star
        )
        terms.append(diff.scaled(-1.0))
        stream += 1

    mean_h = estimate_poisson_expectation(h, intensity, reps=reps, seed=spawn(seed, stream))
    generator = terms[0] if terms else constant(0.0)
    for term in terms[1:]:
        generator = generator + term
    target = constant(h(xi)) + mean_h.scaled(-1.0)
    residual = generator + target.scaled(-1.0)
    return MonteCarloEstimate(
        residual.estimate, residual.standard_error, residual.truncation_bound, reps
    )
