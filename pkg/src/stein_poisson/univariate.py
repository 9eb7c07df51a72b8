"""Chen's method on the non-negative integers.

Exact Poisson and Poisson-binomial tables, total variation, the Stein
equation ``λ f(w+1) − w f(w) = 1_A(w) − Po(λ)(A)`` with its exact recursive
solution and a coupled Monte Carlo solution through the count
immigration-death chain, and the independent-sum error bound.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Collection, Iterable
from dataclasses import dataclass
from functools import reduce

import numpy as np
from numpy.polynomial import Polynomial
from scipy.stats import binom, poisson

from .errors import DomainError, ResourceLimitError
from .logging import get_logger, log_fields
from .montecarlo import MonteCarloEstimate, summarize
from .rng import SeedLike, replication_chunks, spawn_generator

logger = get_logger(__name__)

MASS_TOLERANCE = 1e-12
DELTA_SLACK = 1e-10
MAX_DELTA_CUTOFF = 12
DEFAULT_T_STAR = 30.0
TAIL_RATIO_TOLERANCE = 1e-17


@dataclass(frozen=True)
class BernoulliVector:
    """Success probabilities of independent indicators X_1..X_n."""

    p: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.p)
        for i, v in enumerate(values):
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"p[{i}] = {v} is not a probability")
        object.__setattr__(self, "p", values)

    def __len__(self) -> int:
        return len(self.p)

    @property
    def lam(self) -> float:
        """λ = Σ p_i."""
        return math.fsum(self.p)

    @property
    def sum_squares(self) -> float:
        """Σ p_i²."""
        return math.fsum(v * v for v in self.p)

    @property
    def max_p(self) -> float:
        """max_i p_i (0 for an empty vector)."""
        return max(self.p, default=0.0)


@dataclass(frozen=True)
class PmfTable:
    """Probabilities on {0..N} plus the mass above N.

    Attributes:
        probabilities: P(0), ..., P(N).
        tail_mass: P(> N), kept explicitly rather than dropped.
    """

    probabilities: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self) -> None:
        probs = np.array(self.probabilities, dtype=float).reshape(-1)
        if probs.size == 0:
            raise DomainError("a pmf table needs at least the entry for 0")
        # convolution round-off can leave entries like -1e-18
        if np.any(probs < -MASS_TOLERANCE) or self.tail_mass < -MASS_TOLERANCE:
            raise DomainError("probabilities must be nonnegative")
        probs = np.clip(probs, 0.0, None)
        tail = max(float(self.tail_mass), 0.0)
        total = math.fsum(probs) + tail
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise DomainError(f"pmf table has total mass {total!r}, expected 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "tail_mass", tail)

    @property
    def cutoff(self) -> int:
        """N, the largest tabulated value."""
        return int(self.probabilities.size - 1)

    def __getitem__(self, w: int) -> float:
        return float(self.probabilities[w]) if 0 <= w <= self.cutoff else 0.0

    def extended(self, cutoff: int) -> np.ndarray:
        """Probabilities padded with zeros up to ``cutoff`` (never shortened)."""
        size = max(cutoff, self.cutoff) + 1
        out = np.zeros(size)
        out[: self.probabilities.size] = self.probabilities
        return out

    def mass(self, members: Iterable[int], cofinal: bool = False) -> float:
        """P(A) for A ⊆ {0..N}; with ``cofinal`` A also contains every w > N."""
        total = math.fsum(self[w] for w in set(members))
        return total + self.tail_mass if cofinal else total

    def mean(self) -> float:
        """Mean of the tabulated part."""
        return math.fsum(w * p for w, p in enumerate(self.probabilities))


def default_cutoff(lam: float) -> int:
    """Cutoff ⌈λ + 12√λ + 30⌉, far enough out that the Poisson tail is negligible."""
    return math.ceil(lam + 12.0 * math.sqrt(lam) + 30.0)


def poisson_pmf(lam: float, cutoff: int | None = None) -> PmfTable:
    """Po(λ) on {0..N} with the exact upper tail.

    Raises:
        DomainError: If λ < 0 or N < 0.

    Examples:
        >>> poisson_pmf(0.0, 3).probabilities.tolist()
        [1.0, 0.0, 0.0, 0.0]
    """
    if not math.isfinite(lam) or lam < 0.0:
        raise DomainError(f"Poisson rate must be finite and >= 0, got {lam}")
    n = default_cutoff(lam) if cutoff is None else cutoff
    if n < 0:
        raise DomainError(f"cutoff must be >= 0, got {n}")
    if lam == 0.0:
        probs = np.zeros(n + 1)
        probs[0] = 1.0
        return PmfTable(probs, 0.0)
    probs = poisson.pmf(np.arange(n + 1), lam)
    return PmfTable(probs, float(poisson.sf(n, lam)))


def poisson_binomial_pmf(p: BernoulliVector) -> PmfTable:
    """Exact law of W = Σ X_i by sequential convolution.

    Examples:
        >>> poisson_binomial_pmf(BernoulliVector((0.5, 0.5))).probabilities.tolist()
        [0.25, 0.5, 0.25]
    """
    kernels = (np.array([1.0 - q, q]) for q in p.p)
    probs = reduce(np.convolve, kernels, np.array([1.0]))
    return PmfTable(probs, 0.0)


def total_variation(first: PmfTable, second: PmfTable) -> float:
    """½ Σ|P(w) − Q(w)|, the two tails acting as one extra symbol."""
    n = max(first.cutoff, second.cutoff)
    diff = np.abs(first.extended(n) - second.extended(n))
    value = 0.5 * (math.fsum(diff) + abs(first.tail_mass - second.tail_mass))
    return min(value, 1.0)


# ---------------------------------------------------------------------------
# Stein equation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SteinSolutionTable:
    """f(0..N+1) solving λ f(w+1) − w f(w) = 1_A(w) − Po(λ)(A) for w ≤ N.

    ``f(0)`` is set to 0; it never matters because it is multiplied by w = 0.
    """

    target: frozenset[int]
    cofinal: bool
    lam: float
    values: np.ndarray
    target_mass: float

    @property
    def cutoff(self) -> int:
        return int(self.values.size - 2)

    def indicator(self) -> np.ndarray:
        """1_A(w) for w = 0..N."""
        out = np.zeros(self.cutoff + 1)
        out[sorted(self.target)] = 1.0
        return out

    def residual(self) -> float:
        """max_w |λ f(w+1) − w f(w) − (1_A(w) − Po(λ)(A))| over w ≤ N."""
        w = np.arange(self.cutoff + 1)
        lhs = self.lam * self.values[1:] - w * self.values[:-1]
        rhs = self.indicator() - self.target_mass
        return float(np.max(np.abs(lhs - rhs)))

    def delta(self) -> np.ndarray:
        """Δf(w) = f(w+1) − f(w) for w = 1..N."""
        return np.diff(self.values)[1:]


def _tail_ratio(lam: float, n: int) -> float:
    """Po(λ)(w > n) / π_n as Σ_j Π_{i≤j} λ/(n + i); finite even when π_n underflows."""
    total, term, i = 0.0, 1.0, 1
    while True:
        term *= lam / (n + i)
        total += term
        if term <= TAIL_RATIO_TOLERANCE * total:
            return total
        i += 1


def stein_solution_recursive(
    target: Collection[int], lam: float, cutoff: int, cofinal: bool = False
) -> SteinSolutionTable:
    """Exact bounded solution of the Stein equation on {0..N+1}.

    Values below λ come from the forward recursion
    ``f(w+1) = [1_A(w) − Po(λ)(A) + w f(w)] / λ``; values above λ from the
    same recursion run backwards from the closed form at N+1. Both directions
    only ever shrink rounding errors, so the table is accurate at any cutoff.

    Args:
        target: A ⊆ {0..N}.
        lam: λ > 0.
        cutoff: N.
        cofinal: Also include every w > N in A.

    Raises:
        DomainError: If λ ≤ 0 or A is not inside {0..N}.

    Examples:
        >>> f = stein_solution_recursive({0}, 1.0, 5)
        >>> round(f.values[1], 12)
        0.632120558829
    """
    if not math.isfinite(lam) or lam <= 0.0:
        raise DomainError(f"the Stein equation needs λ > 0, got {lam}")
    members = frozenset(int(a) for a in target)
    if any(a < 0 or a > cutoff for a in members):
        raise DomainError(f"target set must lie in 0..{cutoff}")

    pmf = poisson_pmf(lam, cutoff)
    target_mass = pmf.mass(members, cofinal)
    indicator = np.zeros(cutoff + 1)
    indicator[sorted(members)] = 1.0

    values = np.zeros(cutoff + 2)
    turn = min(max(1, math.floor(lam)), cutoff + 1)
    for w in range(turn):
        values[w + 1] = (indicator[w] - target_mass + w * values[w]) / lam

    if turn < cutoff + 1:
        # f(N+1) = (tail / π_N) (Po(A ∩ {0..N}) − [cofinal] Po({0..N})) / λ
        anchor = pmf.mass(members) - (float(poisson.cdf(cutoff, lam)) if cofinal else 0.0)
        values[cutoff + 1] = _tail_ratio(lam, cutoff) * anchor / lam
        for w in range(cutoff, turn, -1):
            values[w] = (lam * values[w + 1] - indicator[w] + target_mass) / w

    values.setflags(write=False)
    return SteinSolutionTable(members, cofinal, float(lam), values, target_mass)


def stein_solution_basis(lam: float, cutoff: int) -> np.ndarray:
    """Rows j = 0..N hold the solution for A = {j}; f_A is the sum of its rows."""
    return np.vstack([stein_solution_recursive({j}, lam, cutoff).values for j in range(cutoff + 1)])


@dataclass(frozen=True)
class DeltaBoundReport:
    """Exhaustive check of |Δf_A(w)| ≤ (1 − e^{−λ})/λ over every A ⊆ {0..N}."""

    lam: float
    cutoff: int
    subsets: int
    bound: float
    max_ratio: float
    max_residual: float
    worst_subset: tuple[int, ...]
    passed: bool


def check_delta_bound(lam: float, cutoff: int = 10) -> DeltaBoundReport:
    """Check the Δf bound and the equation residual for all 2^(N+1) subsets.

    Raises:
        ResourceLimitError: If N > 12.
    """
    if cutoff > MAX_DELTA_CUTOFF:
        raise ResourceLimitError(f"subset enumeration limited to N <= {MAX_DELTA_CUTOFF}")
    basis = stein_solution_basis(lam, cutoff)
    masks = np.array(list(itertools.product((0.0, 1.0), repeat=cutoff + 1)))
    tables = masks @ basis

    pmf = poisson_pmf(lam, cutoff)
    target_mass = masks @ pmf.probabilities
    w = np.arange(cutoff + 1)
    lhs = lam * tables[:, 1:] - w * tables[:, :-1]
    residual = np.abs(lhs - (masks - target_mass[:, None]))

    bound = (1.0 - math.exp(-lam)) / lam
    deltas = np.abs(np.diff(tables, axis=1)[:, 1:])
    worst = deltas.max(axis=1) if cutoff >= 1 else np.zeros(len(masks))
    worst_row = int(np.argmax(worst))
    report = DeltaBoundReport(
        lam=lam,
        cutoff=cutoff,
        subsets=len(masks),
        bound=bound,
        max_ratio=float(worst[worst_row] / bound),
        max_residual=float(residual.max()),
        worst_subset=tuple(int(j) for j in np.flatnonzero(masks[worst_row])),
        passed=bool(worst.max() <= bound + DELTA_SLACK),
    )
    logger.debug(
        "delta bound checked",
        extra=log_fields(lam=lam, cutoff=cutoff, max_ratio=report.max_ratio),
    )
    return report


def chen_identity_residual(pmf: PmfTable, lam: float, f: SteinSolutionTable) -> float:
    """Σ_w P(w)[λ f(w+1) − w f(w)] over the tabulated part of P.

    Raises:
        DomainError: If P is tabulated beyond f's cutoff.
    """
    if pmf.cutoff > f.cutoff:
        raise DomainError(f"pmf cutoff {pmf.cutoff} exceeds solution cutoff {f.cutoff}")
    n = pmf.cutoff
    w = np.arange(n + 1)
    terms = pmf.probabilities * (lam * f.values[1 : n + 2] - w * f.values[: n + 1])
    return math.fsum(terms)


def chen_truncation_bound(pmf: PmfTable, lam: float, f: SteinSolutionTable) -> float:
    """Bound on |chen_identity_residual| when P is Po(λ) truncated at N.

    The truncated sum telescopes to λ P(N) f(N+1).
    """
    return lam * (pmf[pmf.cutoff] + pmf.tail_mass) * float(np.max(np.abs(f.values)))


# ---------------------------------------------------------------------------
# Independent sums
# ---------------------------------------------------------------------------


def dtv_bound_independent(p: BernoulliVector) -> float:
    """(1 ∧ 1/λ) Σ p_i²; 0 for an empty or all-zero vector."""
    lam = p.lam
    if lam == 0.0:
        return 0.0
    return min(1.0, 1.0 / lam) * p.sum_squares


def exact_dtv_poisson_binomial(p: BernoulliVector) -> float:
    """Exact d_TV between the law of Σ X_i and Po(λ)."""
    lam = p.lam
    cutoff = max(len(p), default_cutoff(lam))
    return total_variation(poisson_binomial_pmf(p), poisson_pmf(lam, cutoff))


@dataclass(frozen=True)
class OrderRatioSummary:
    """Range of d_TV / Σ p_i² over a random family of vectors."""

    samples: int
    min_ratio: float
    max_ratio: float
    violations: int


def random_bernoulli_vector(rng: np.random.Generator, max_n: int) -> BernoulliVector:
    """n uniform on 1..max_n, each p_i uniform on (0, 1)."""
    n = int(rng.integers(1, max_n + 1))
    return BernoulliVector(tuple(rng.random(n)))


def order_ratio_study(samples: int, max_n: int = 12, seed: SeedLike = 0) -> OrderRatioSummary:
    """Compare exact d_TV with the (1 ∧ 1/λ) Σ p_i² bound on random vectors.

    Returns the smallest and largest d_TV / Σ p_i², and the number of vectors
    whose exact distance exceeded the bound.
    """
    rng = spawn_generator(seed, 0)
    ratios = []
    violations = 0
    for _ in range(samples):
        p = random_bernoulli_vector(rng, max_n)
        dtv = exact_dtv_poisson_binomial(p)
        if dtv > dtv_bound_independent(p):
            violations += 1
        ratios.append(dtv / p.sum_squares)
    return OrderRatioSummary(samples, min(ratios), max(ratios), violations)


def expected_reciprocal_count(p: BernoulliVector, excluded: int) -> float:
    """E[1/(Σ_{j≠i} X_j + 1)] = ∫₀¹ Π_{j≠i}(z p_j + 1 − p_j) dz, integrated exactly.

    Args:
        p: Success probabilities.
        excluded: Zero-based index i left out of the sum.

    Examples:
        >>> expected_reciprocal_count(BernoulliVector((0.3, 0.4)), 0)
        0.8
    """
    if not 0 <= excluded < len(p):
        raise DomainError(f"index {excluded} out of range for {len(p)} indicators")
    factors = [Polynomial([1.0 - q, q]) for j, q in enumerate(p.p) if j != excluded]
    generating = reduce(lambda a, b: a * b, factors, Polynomial([1.0]))
    antiderivative = generating.integ()
    return float(antiderivative(1.0) - antiderivative(0.0))


# ---------------------------------------------------------------------------
# Count immigration-death chain
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CountTrajectory:
    """Path of the count chain: births at rate λ, deaths at rate = count.

    Attributes:
        initial: Z(0).
        times: Event times, strictly increasing.
        steps: +1 for a birth, −1 for a death.
        horizon: T.
    """

    initial: int
    times: tuple[float, ...]
    steps: tuple[int, ...]
    horizon: float

    @property
    def final(self) -> int:
        """Z(T)."""
        return self.initial + sum(self.steps)

    def state_at(self, t: float) -> int:
        """Z(t) for 0 ≤ t ≤ T."""
        count = self.initial
        for time, step in zip(self.times, self.steps, strict=True):
            if time > t:
                break
            count += step
        return count


def simulate_count_imdeath(
    initial: int, lam: float, horizon: float, seed: SeedLike
) -> CountTrajectory:
    """Event-driven simulation of the count chain on [0, T].

    The random numbers come from child stream 0 of ``seed``, the same stream
    the spatial simulator uses for event times and types, so both produce
    the same counts for the same seed.
    """
    if horizon < 0:
        raise DomainError(f"horizon must be >= 0, got {horizon}")
    if initial < 0 or lam < 0:
        raise DomainError("initial count and rate must be nonnegative")
    events = spawn_generator(seed, 0)
    times: list[float] = []
    steps: list[int] = []
    t, count = 0.0, initial
    while True:
        rate = lam + count
        if rate == 0.0:
            break
        t += events.exponential(1.0 / rate)
        if t > horizon:
            break
        step = 1 if events.random() * rate < lam else -1
        count += step
        times.append(t)
        steps.append(step)
    return CountTrajectory(initial, tuple(times), tuple(steps), horizon)


def count_imdeath_mean(initial: int, lam: float, t: float) -> float:
    """E Z(t) = w₀ e^{−t} + λ(1 − e^{−t})."""
    survival = math.exp(-t)
    return initial * survival + lam * (1.0 - survival)


def count_imdeath_law(initial: int, lam: float, t: float, cutoff: int | None = None) -> PmfTable:
    """Exact law of Z(t): Bin(w₀, e^{−t}) survivors plus Po(λ(1 − e^{−t})) immigrants."""
    survival = math.exp(-t)
    immigrants = lam * (1.0 - survival)
    n = (initial + default_cutoff(immigrants)) if cutoff is None else cutoff
    survivors = binom.pmf(np.arange(initial + 1), initial, survival)
    arrivals = poisson_pmf(immigrants, n).probabilities
    probs = np.convolve(survivors, arrivals)[: n + 1]
    return PmfTable(probs, max(0.0, 1.0 - math.fsum(probs)))


def stein_solution_probabilistic(
    target: Collection[int],
    lam: float,
    w: int,
    reps: int,
    *,
    seed: SeedLike,
    t_star: float = DEFAULT_T_STAR,
    cofinal: bool = False,
    cutoff: int | None = None,
) -> MonteCarloEstimate:
    """Monte Carlo estimate of f(w) = g_A(w) − g_A(w − 1).

    The chains started from w and w − 1 share every birth and death except
    that of one extra individual with its own Exp(1) lifetime τ. They agree
    after τ, so each replication integrates
    ``−[1_A(Y(t) + 1) − 1_A(Y(t))]`` over ``[0, min(τ, T*)]`` along the path
    Y from w − 1. Cutting at T* biases the mean by at most e^{−T*}.

    Args:
        target: A ⊆ {0..N}.
        lam: Immigration rate λ ≥ 0.
        w: Point of evaluation, w ≥ 1.
        reps: Number of replications.
        seed: Master seed.
        t_star: Truncation horizon T*.
        cofinal: Whether A also holds every value above ``cutoff``.
        cutoff: N; required with ``cofinal``.

    Raises:
        DomainError: If w < 1 or a cofinal set has no cutoff.
    """
    if w < 1:
        raise DomainError("the probabilistic solution is only defined for w >= 1")
    if lam < 0.0:
        raise DomainError(f"rate must be >= 0, got {lam}")
    if cofinal and cutoff is None:
        raise DomainError("a cofinal target set needs its cutoff")
    members = frozenset(int(a) for a in target)
    if not members and not cofinal:
        return MonteCarloEstimate(0.0, 0.0, 0.0, reps)

    def inside(k: int) -> float:
        return 1.0 if k in members or (cofinal and k > cutoff) else 0.0  # type: ignore[operator]

    values = np.empty(reps)
    filled = 0
    for rng, count in replication_chunks(seed, reps):
        for _ in range(count):
            horizon = min(rng.exponential(), t_star)
            t, y, acc = 0.0, w - 1, 0.0
            while True:
                rate = lam + y
                end = t + rng.exponential(1.0 / rate) if rate > 0 else math.inf
                acc += (inside(y + 1) - inside(y)) * (min(end, horizon) - t)
                if end >= horizon:
                    break
                t = end
                y += 1 if rng.random() * rate < lam else -1
            values[filled] = -acc
            filled += 1
    return summarize(values, truncation_bound=math.exp(-t_star))
