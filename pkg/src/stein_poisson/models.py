"""Samplers for the application processes.

* Matérn type I hard-core processes on [0, 1]^d, with their intensity and a
  sampler of the reduced Palm process;
* marked Bernoulli processes Σ I_i δ_{U_i}, lifted to {0..n−1} × Γ so they
  are simple;
* renewal processes on [0, T] and superpositions of independent groups.

Every sampler is a pure function of its parameters and a seed.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Protocol

import numpy as np
from scipy import integrate
from scipy.spatial import cKDTree

from .carrier import CarrierSpace, Configuration, FiniteAtoms, Lifted, Point
from .errors import DomainError, ResourceLimitError
from .logging import get_logger, log_fields
from .palmexact import ConfigDistribution
from .rng import SeedLike, as_generator, spawn_generator

logger = get_logger(__name__)

MAX_TABLE_INDICATORS = 20
MAX_ARRIVALS = 1_000_000
MAX_REJECTIONS = 1_000_000
BALL_VOLUME_MC_SAMPLES = 200_000


# ---------------------------------------------------------------------------
# Matérn type I hard-core process
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaternSpec:
    """Poisson parent of mean count μ on [0, 1]^d thinned at radius r.

    The window has volume 1, so the parent intensity ν equals μ.
    """

    mean_count: float
    radius: float
    dimension: int = 1

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean_count) or self.mean_count < 0.0:
            raise DomainError(f"mean count must be >= 0, got {self.mean_count}")
        if not self.radius > 0.0:
            raise DomainError(f"radius must be > 0, got {self.radius}")
        if self.dimension < 1:
            raise DomainError(f"dimension must be >= 1, got {self.dimension}")

    @property
    def parent_intensity(self) -> float:
        """ν = μ / Vol(Γ)."""
        return self.mean_count


@dataclass(frozen=True)
class MaternSample:
    """Both layers of one Matérn draw."""

    parent: Configuration
    thinned: Configuration


def _as_points(coords: np.ndarray) -> tuple[Point, ...]:
    if coords.shape[1] == 1:
        return tuple(float(v) for v in coords[:, 0])
    return tuple(tuple(float(v) for v in row) for row in coords)


def matern_thin(coords: np.ndarray, radius: float) -> np.ndarray:
    """Keep the rows with no other row within distance ≤ ``radius``."""
    if len(coords) < 2:
        return coords
    doomed = {i for pair in cKDTree(coords).query_pairs(radius) for i in pair}
    keep = [i for i in range(len(coords)) if i not in doomed]
    return coords[keep]


def sample_matern_coords(
    spec: MaternSpec, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Parent and thinned coordinates as (n, d) arrays."""
    count = int(rng.poisson(spec.mean_count))
    parent = rng.random((count, spec.dimension))
    return parent, matern_thin(parent, spec.radius)


def sample_matern(spec: MaternSpec, seed: SeedLike) -> MaternSample:
    """Matérn type I: delete every parent point with another parent point within r.

    Deletion does not depend on whether the other point is itself deleted.
    """
    parent, thinned = sample_matern_coords(spec, as_generator(seed))
    return MaternSample(Configuration(_as_points(parent)), Configuration(_as_points(thinned)))


def _reduced_palm_coords(
    spec: MaternSpec, alpha: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    parent = rng.random((int(rng.poisson(spec.mean_count)), spec.dimension))
    outside = np.linalg.norm(parent - alpha, axis=1) > spec.radius
    return matern_thin(parent[outside], spec.radius)


def sample_matern_reduced_palm(spec: MaternSpec, alpha: Point, seed: SeedLike) -> Configuration:
    """Reduced Palm process of the Matérn process at α.

    The parent seen from a parent point at α is the parent plus δ_α; α
    survives exactly when the parent has no point within r of it, and a
    Poisson process conditioned to avoid that ball is the process restricted
    to its complement. So: restrict the parent to Γ ∖ B(α, r), thin it, and
    leave α out.
    """
    center = np.atleast_1d(np.asarray(alpha, dtype=float))
    coords = _reduced_palm_coords(spec, center, as_generator(seed))
    return Configuration(_as_points(coords))


def ball_intersection_volume(x: Point, radius: float, dimension: int) -> float:
    """Vol(B(x, r) ∩ [0, 1]^d).

    Exact for d = 1, adaptive quadrature for d = 2, and a fixed-seed Monte
    Carlo estimate above that.
    """
    center = np.atleast_1d(np.asarray(x, dtype=float))
    if dimension == 1:
        c = float(center[0])
        return max(0.0, min(1.0, c + radius) - max(0.0, c - radius))
    if dimension == 2:
        cx, cy = float(center[0]), float(center[1])

        def chord(u: float) -> float:
            half = math.sqrt(max(radius * radius - (u - cx) ** 2, 0.0))
            return max(0.0, min(1.0, cy + half) - max(0.0, cy - half))

        lo, hi = max(0.0, cx - radius), min(1.0, cx + radius)
        if hi <= lo:
            return 0.0
        value, _ = integrate.quad(chord, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)
        return float(value)

    logger.warning(
        "ball volume by Monte Carlo in dimension %d",
        dimension,
        extra=log_fields(samples=BALL_VOLUME_MC_SAMPLES),
    )
    rng = np.random.default_rng(0)
    lo = np.clip(center - radius, 0.0, 1.0)
    hi = np.clip(center + radius, 0.0, 1.0)
    box = float(np.prod(hi - lo))
    if box == 0.0:
        return 0.0
    pts = lo + (hi - lo) * rng.random((BALL_VOLUME_MC_SAMPLES, dimension))
    inside = np.linalg.norm(pts - center, axis=1) <= radius
    return box * float(inside.mean())


def matern_intensity_density(spec: MaternSpec, x: Point) -> float:
    """ν exp(−ν Vol(B(x, r) ∩ Γ)): the parent intensity times the void probability."""
    nu = spec.parent_intensity
    return nu * math.exp(-nu * ball_intersection_volume(x, spec.radius, spec.dimension))


def matern_mean_count(spec: MaternSpec) -> float:
    """λ = ∫_Γ matern_intensity_density."""
    r = spec.radius
    if spec.dimension == 1:
        breaks = sorted({b for b in (r, 1.0 - r) if 0.0 < b < 1.0}) or None
        value, _ = integrate.quad(
            lambda u: matern_intensity_density(spec, u), 0.0, 1.0, points=breaks, limit=200
        )
        return float(value)
    if spec.dimension == 2:
        value, _ = integrate.dblquad(
            lambda v, u: matern_intensity_density(spec, (u, v)), 0.0, 1.0, 0.0, 1.0, epsabs=1e-9
        )
        return float(value)
    rng = np.random.default_rng(0)
    samples = rng.random((4096, spec.dimension))
    return float(np.mean([matern_intensity_density(spec, tuple(s)) for s in samples]))


@dataclass(frozen=True)
class MaternModel:
    """Matérn process seen as a locally dependent process with neighbourhoods B(α, 2r).

    Provides what the Monte Carlo evaluator of the locally dependent bound
    needs: samples, the neighbourhood test, an importance sampler of pairs
    (α, β ∈ B(α, 2r)) under λ(dα)λ(dβ), and the reduced Palm sampler.
    """

    spec: MaternSpec

    @property
    def reach(self) -> float:
        """Neighbourhood radius 2r."""
        return 2.0 * self.spec.radius

    @cached_property
    def lam(self) -> float:
        """Total intensity λ of the thinned process."""
        return matern_mean_count(self.spec)

    def total_intensity(self) -> float:
        return self.lam

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return sample_matern_coords(self.spec, rng)[1]

    def neighbourhood_mask(self, alpha: np.ndarray, coords: np.ndarray) -> np.ndarray:
        """Rows of ``coords`` inside B(α, 2r)."""
        return np.linalg.norm(coords - alpha, axis=1) <= self.reach

    def _sample_location(self, rng: np.random.Generator) -> np.ndarray:
        nu = self.spec.parent_intensity
        for _ in range(MAX_REJECTIONS):
            u = rng.random(self.spec.dimension)
            if rng.random() * nu < matern_intensity_density(self.spec, u):
                return u
        raise ResourceLimitError(
            f"no retained location after {MAX_REJECTIONS} proposals; the retention probability "
            "e^{−ν Vol(B(u, r))} is too small"
        )

    def sample_neighbour_pair(
        self, rng: np.random.Generator
    ) -> tuple[np.ndarray, np.ndarray, float]:
        """Draw α ~ λ/λ and β uniform on B(α, 2r) ∩ Γ.

        Returns:
            ``(α, β, weight)`` with weight = λ · Vol(B(α, 2r) ∩ Γ) · density(β),
            so E[weight · φ(α, β)] = ∫∫_{β ∈ B(α, 2r)} φ λ(dα) λ(dβ).
        """
        d = self.spec.dimension
        alpha = self._sample_location(rng)
        lo = np.clip(alpha - self.reach, 0.0, 1.0)
        hi = np.clip(alpha + self.reach, 0.0, 1.0)
        for _ in range(MAX_REJECTIONS):
            beta = lo + (hi - lo) * rng.random(d)
            if np.linalg.norm(beta - alpha) <= self.reach:
                break
        else:
            raise ResourceLimitError(f"no neighbour of α accepted in {MAX_REJECTIONS} proposals")
        volume = ball_intersection_volume(tuple(alpha), self.reach, d)
        weight = self.lam * volume * matern_intensity_density(self.spec, tuple(beta))
        return alpha, beta, weight

    def sample_reduced_palm(self, beta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return _reduced_palm_coords(self.spec, beta, rng)


# ---------------------------------------------------------------------------
# Indicator laws and marked Bernoulli processes
# ---------------------------------------------------------------------------


class IndicatorLaw(Protocol):
    """Joint law of indicators I_0..I_{n−1}."""

    @property
    def size(self) -> int: ...

    def sample(self, rng: np.random.Generator) -> np.ndarray: ...

    def marginals(self) -> np.ndarray: ...

    def table(self) -> dict[tuple[int, ...], float]: ...

    def neighbourhoods(self) -> list[frozenset[int]]: ...


def _enumeration_guard(n: int) -> None:
    if n > MAX_TABLE_INDICATORS:
        raise ResourceLimitError(
            f"joint tables limited to {MAX_TABLE_INDICATORS} indicators, got {n}"
        )


@dataclass(frozen=True)
class IndependentIndicators:
    """Independent I_i ~ Bernoulli(p_i)."""

    p: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if any(not 0.0 <= v <= 1.0 for v in self.p):
            raise DomainError("indicator probabilities must lie in [0, 1]")

    @property
    def size(self) -> int:
        return len(self.p)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return (rng.random(self.size) < np.asarray(self.p)).astype(int)

    def marginals(self) -> np.ndarray:
        return np.asarray(self.p)

    def table(self) -> dict[tuple[int, ...], float]:
        _enumeration_guard(self.size)
        out = {}
        for bits in itertools.product((0, 1), repeat=self.size):
            out[bits] = math.prod(q if b else 1.0 - q for b, q in zip(bits, self.p, strict=True))
        return out

    def neighbourhoods(self) -> list[frozenset[int]]:
        return [frozenset({i}) for i in range(self.size)]


@dataclass(frozen=True)
class TableIndicators:
    """Indicators with an explicit joint table over {0, 1}^n."""

    probabilities: Mapping[tuple[int, ...], float]

    def __post_init__(self) -> None:
        items = sorted(self.probabilities.items())
        cleaned = {tuple(int(b) for b in k): float(v) for k, v in items}
        sizes = {len(k) for k in cleaned}
        if len(sizes) != 1 or any(b not in (0, 1) for k in cleaned for b in k):
            raise DomainError("table keys must be 0/1 vectors of one length")
        _enumeration_guard(sizes.pop())
        if any(v < 0.0 for v in cleaned.values()) or abs(math.fsum(cleaned.values()) - 1.0) > 1e-12:
            raise DomainError("table probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "probabilities", cleaned)

    @property
    def size(self) -> int:
        return len(next(iter(self.probabilities)))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        keys = list(self.probabilities)
        weights = np.fromiter(self.probabilities.values(), dtype=float)
        return np.asarray(keys[int(rng.choice(len(keys), p=weights / weights.sum()))])

    def marginals(self) -> np.ndarray:
        out = np.zeros(self.size)
        for key, prob in self.probabilities.items():
            out += prob * np.asarray(key)
        return out

    def table(self) -> dict[tuple[int, ...], float]:
        return dict(self.probabilities)

    def neighbourhoods(self) -> list[frozenset[int]]:
        # no structure is known, so every indicator may depend on every other
        return [frozenset(range(self.size)) for _ in range(self.size)]


@dataclass(frozen=True)
class MovingWindowIndicators:
    """I_i = min(Y_i, ..., Y_{i+m}) for i.i.d. Y_j ~ Bernoulli(q).

    The indicators are m-dependent: I_i is independent of {I_j : |i − j| > m}.
    """

    n: int
    window: int
    q: float

    def __post_init__(self) -> None:
        if self.n < 1 or self.window < 0 or not 0.0 <= self.q <= 1.0:
            raise DomainError("need n >= 1, window >= 0 and q in [0, 1]")

    @property
    def size(self) -> int:
        return self.n

    def _indicators(self, y: Sequence[int]) -> tuple[int, ...]:
        return tuple(min(y[i : i + self.window + 1]) for i in range(self.n))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        y = (rng.random(self.n + self.window) < self.q).astype(int)
        return np.asarray(self._indicators(list(y)))

    def marginals(self) -> np.ndarray:
        return np.full(self.n, self.q ** (self.window + 1))

    def table(self) -> dict[tuple[int, ...], float]:
        _enumeration_guard(self.n + self.window)
        out: dict[tuple[int, ...], float] = {}
        for y in itertools.product((0, 1), repeat=self.n + self.window):
            ones = sum(y)
            prob = self.q**ones * (1.0 - self.q) ** (len(y) - ones)
            key = self._indicators(y)
            out[key] = out.get(key, 0.0) + prob
        return out

    def neighbourhoods(self) -> list[frozenset[int]]:
        return [
            frozenset(j for j in range(self.n) if abs(i - j) <= self.window) for i in range(self.n)
        ]


@dataclass(frozen=True)
class MarkedBernoulliSpec:
    """Ξ = Σ I_i δ_{U_i} with marks independent of the indicators.

    Attributes:
        indicators: Joint law of the I_i.
        base: Carrier Γ of the marks.
        marks: Fixed marks U_i; ``None`` draws them i.i.d. with
            ``base.sample_point``.
        neighbourhoods: A_i ∋ i; defaults to the indicator law's own.
    """

    indicators: IndicatorLaw
    base: CarrierSpace
    marks: tuple[Point, ...] | None = None
    neighbourhoods: tuple[frozenset[int], ...] | None = field(default=None)

    def __post_init__(self) -> None:
        n = self.indicators.size
        if self.marks is not None and len(self.marks) != n:
            raise DomainError(f"{len(self.marks)} marks for {n} indicators")
        hoods = self.neighbourhoods
        if hoods is None:
            hoods = tuple(self.indicators.neighbourhoods())
        else:
            hoods = tuple(frozenset(h) for h in hoods)
        if len(hoods) != n or any(i not in hood for i, hood in enumerate(hoods)):
            raise DomainError("every neighbourhood A_i must contain i")
        object.__setattr__(self, "neighbourhoods", hoods)

    @property
    def size(self) -> int:
        return self.indicators.size

    @property
    def lifted_space(self) -> Lifted:
        """Γ′ = {0..n−1} × Γ."""
        return Lifted(self.size, self.base)

    def lifted_distribution(self) -> ConfigDistribution:
        """Exact law of Ξ′ on the flattened lifted carrier.

        Needs fixed marks on a finite base; atom ``i * k + U_i`` carries I_i.
        """
        if self.marks is None or not isinstance(self.base, FiniteAtoms):
            raise DomainError("the exact lifted law needs fixed marks on a finite carrier")
        k = self.base.size
        carrier = self.lifted_space.to_finite()
        out: dict[tuple[int, ...], float] = {}
        for bits, prob in self.indicators.table().items():
            counts = [0] * (self.size * k)
            for i, bit in enumerate(bits):
                if bit:
                    counts[i * k + int(self.marks[i])] = 1
            out[tuple(counts)] = out.get(tuple(counts), 0.0) + prob
        return ConfigDistribution(carrier, out)


@dataclass(frozen=True)
class MarkedSample:
    """A marked Bernoulli draw on Γ and on Γ′."""

    base: Configuration
    lifted: Configuration
    indicators: tuple[int, ...]


def sample_marked_bernoulli(spec: MarkedBernoulliSpec, seed: SeedLike) -> MarkedSample:
    """Draw indicators from their joint law and marks independently."""
    rng = as_generator(seed)
    bits = tuple(int(b) for b in spec.indicators.sample(rng))
    marks = spec.marks
    if marks is None:
        marks = tuple(spec.base.sample_point(rng) for _ in bits)
    lifted = tuple((i, marks[i]) for i, bit in enumerate(bits) if bit)
    return MarkedSample(
        base=Configuration(tuple(mark for _, mark in lifted)),
        lifted=Configuration(lifted),
        indicators=bits,
    )


# ---------------------------------------------------------------------------
# Renewal processes
# ---------------------------------------------------------------------------


class RenewalLaw(Protocol):
    """Law of a first-arrival time or of a gap."""

    def sample(self, rng: np.random.Generator) -> float: ...

    def cdf(self, t: float) -> float: ...


@dataclass(frozen=True)
class ContinuousLaw:
    """Wrapper around a frozen ``scipy.stats`` distribution."""

    distribution: Any

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.distribution.rvs(random_state=rng))

    def cdf(self, t: float) -> float:
        return float(self.distribution.cdf(t))


@dataclass(frozen=True)
class SlotLaw:
    """Possibly defective pmf on {1..m}; missing mass means "never"."""

    pmf: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pmf", tuple(float(v) for v in self.pmf))
        if any(v < 0.0 for v in self.pmf) or math.fsum(self.pmf) > 1.0 + 1e-12:
            raise DomainError("slot law must be a (possibly defective) pmf")

    def sample(self, rng: np.random.Generator) -> float:
        u = rng.random()
        acc = 0.0
        for slot, prob in enumerate(self.pmf, start=1):
            acc += prob
            if u < acc:
                return float(slot)
        return math.inf

    def cdf(self, t: float) -> float:
        return math.fsum(self.pmf[: max(0, min(int(math.floor(t)), len(self.pmf)))])


@dataclass(frozen=True)
class RenewalComponent:
    """One renewal process: first arrival ~ G, then gaps ~ F with F(0) = 0."""

    first: RenewalLaw
    gap: RenewalLaw

    def __post_init__(self) -> None:
        if self.gap.cdf(0.0) > 0.0:
            raise DomainError("gap law must put no mass at 0")

    def sampler(self, horizon: float) -> Callable[[np.random.Generator], Configuration]:
        """Component sampler for :func:`sample_superposition`."""
        return lambda rng: _renewal_arrivals(self.first, self.gap, horizon, rng)


def _renewal_arrivals(
    first: RenewalLaw, gap: RenewalLaw, horizon: float, rng: np.random.Generator
) -> Configuration:
    arrivals: list[float] = []
    t = first.sample(rng)
    while t <= horizon:
        arrivals.append(t)
        if len(arrivals) > MAX_ARRIVALS:
            raise ResourceLimitError("more than 10^6 arrivals: the gap law has mass at 0")
        step = gap.sample(rng)
        if step <= 0.0:
            raise DomainError(f"gap law produced a nonpositive gap {step}")
        t += step
    return Configuration(tuple(arrivals))


def sample_renewal(
    first: RenewalLaw, gap: RenewalLaw, horizon: float, seed: SeedLike
) -> Configuration:
    """Arrivals S₁ ~ G, S_{k+1} = S_k + X_k with X_k ~ F, kept while ≤ T."""
    return _renewal_arrivals(first, gap, horizon, as_generator(seed))


@dataclass(frozen=True)
class Superposition:
    """Total configuration and the component configurations it is made of."""

    total: Configuration
    parts: tuple[Configuration, ...]


def sample_superposition(
    components: Sequence[Callable[[np.random.Generator], Configuration]],
    groups: Sequence[Sequence[int]] | None,
    seed: SeedLike,
) -> Superposition:
    """Multiset sum of component samples.

    Components in different groups draw from different child streams of
    ``seed`` and are therefore independent; components inside one group
    share a stream in index order. ``None`` puts each component in its own
    group.

    Raises:
        DomainError: If ``groups`` is not a partition of the component indices.
    """
    n = len(components)
    blocks = [[i] for i in range(n)] if groups is None else [list(g) for g in groups]
    flat = sorted(i for block in blocks for i in block)
    if flat != list(range(n)):
        raise DomainError("groups must partition the component indices")
    parts: list[Configuration | None] = [None] * n
    for g, block in enumerate(blocks):
        rng = spawn_generator(seed, g)
        for i in sorted(block):
            parts[i] = components[i](rng)
    done = tuple(p if p is not None else Configuration() for p in parts)
    total = Configuration(tuple(x for part in done for x in part.points))
    return Superposition(total, done)
