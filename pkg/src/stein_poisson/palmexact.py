"""Exact point-process calculus on finite carriers.

Distributions of point processes on k atoms are stored explicitly as maps
from count vectors to probabilities. On such carriers the Campbell measure
disintegrates by hand, so Palm laws come straight from the definition
``Q_a(ξ) = P(ξ) ξ(a) / λ(a)``, and the distance d₂ between two laws is a
finite transportation problem with ground cost ρ₁, solved exactly with the
network simplex of POT.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from collections.abc import Callable, Collection, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import ot
from scipy.stats import poisson

from .carrier import FiniteAtoms, Lifted, assignment_cost, slot_carrier
from .errors import DomainError, PalmUndefinedError, ResourceLimitError
from .logging import get_logger, log_fields
from .univariate import BernoulliVector, PmfTable, default_cutoff

logger = get_logger(__name__)

Counts = tuple[int, ...]
AtomFunction = Callable[[int, Counts], float]
"""f(a, ξ): a function of an atom and a count vector."""

MASS_TOLERANCE = 1e-12
MAX_SUPPORT = 2_000_000
MAX_TRANSPORT_CELLS = 25_000_000
MAX_INDICATORS = 20
MAX_SLOTS = 20
EMD_MAX_ITERATIONS = 10_000_000


@dataclass(frozen=True, eq=False)
class ConfigDistribution:
    """Finitely supported law of a point process on a finite carrier.

    Attributes:
        carrier: The atoms and their distances.
        probabilities: Count vector → probability; zero entries are dropped and
            the map is kept in sorted key order.
        truncated_mass: Mass discarded by truncation; the probabilities sum to
            ``1 − truncated_mass``.
    """

    carrier: FiniteAtoms
    probabilities: Mapping[Counts, float]
    truncated_mass: float = 0.0

    def __post_init__(self) -> None:
        k = self.carrier.size
        cleaned: dict[Counts, float] = {}
        for key, prob in sorted(self.probabilities.items()):
            counts = tuple(int(c) for c in key)
            if len(counts) != k or any(c < 0 for c in counts):
                raise DomainError(f"{key!r} is not a count vector on {k} atoms")
            if prob < -MASS_TOLERANCE:
                raise DomainError(f"negative probability {prob} for {key!r}")
            if prob > 0.0:
                cleaned[counts] = cleaned.get(counts, 0.0) + float(prob)
        if not -MASS_TOLERANCE <= self.truncated_mass <= 1.0 + MASS_TOLERANCE:
            raise DomainError(f"truncated mass {self.truncated_mass} outside [0, 1]")
        total = math.fsum(cleaned.values()) + self.truncated_mass
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise DomainError(f"probabilities and truncated mass sum to {total!r}, expected 1")
        object.__setattr__(self, "probabilities", cleaned)
        object.__setattr__(self, "truncated_mass", max(0.0, float(self.truncated_mass)))

    def __len__(self) -> int:
        return len(self.probabilities)

    def __iter__(self) -> Iterator[tuple[Counts, float]]:
        return iter(self.probabilities.items())

    @property
    def atoms(self) -> int:
        return self.carrier.size

    @cached_property
    def support_matrix(self) -> np.ndarray:
        """Support as an S×k integer matrix, rows in key order."""
        if not self.probabilities:
            return np.zeros((0, self.atoms), dtype=int)
        return np.array(list(self.probabilities), dtype=int).reshape(-1, self.atoms)

    @cached_property
    def weights(self) -> np.ndarray:
        """Probabilities in key order."""
        return np.fromiter(self.probabilities.values(), dtype=float, count=len(self.probabilities))

    @classmethod
    def point_mass(cls, carrier: FiniteAtoms, counts: Sequence[int]) -> ConfigDistribution:
        """Law of the deterministic configuration ``counts``."""
        return cls(carrier, {tuple(counts): 1.0})

    def get(self, counts: Sequence[int]) -> float:
        """P(Ξ = counts)."""
        return self.probabilities.get(tuple(counts), 0.0)

    def expectation(self, h: Callable[[Counts], float]) -> float:
        """Σ_ξ P(ξ) h(ξ) over the stored support."""
        return math.fsum(prob * h(key) for key, prob in self.probabilities.items())

    def restrict(self, atoms: Collection[int]) -> ConfigDistribution:
        """Law of Ξ|_B for B = ``atoms``: counts outside B are set to zero."""
        keep = set(atoms)
        out: dict[Counts, float] = defaultdict(float)
        for key, prob in self.probabilities.items():
            out[tuple(c if a in keep else 0 for a, c in enumerate(key))] += prob
        return ConfigDistribution(self.carrier, out, self.truncated_mass)

    def shift(self, atom: int, by: int) -> ConfigDistribution:
        """Law of Ξ + by·δ_atom.

        Raises:
            DomainError: If a count would become negative.
        """
        out: dict[Counts, float] = {}
        for key, prob in self.probabilities.items():
            moved = list(key)
            moved[atom] += by
            if moved[atom] < 0:
                raise DomainError(f"shift by {by} makes a negative count at atom {atom}")
            out[tuple(moved)] = prob
        return ConfigDistribution(self.carrier, out, self.truncated_mass)

    def normalized(self) -> ConfigDistribution:
        """Rescale the stored probabilities to total 1."""
        kept = 1.0 - self.truncated_mass
        if kept <= 0.0:
            raise DomainError("cannot normalize a distribution with no stored mass")
        return ConfigDistribution(
            self.carrier, {key: prob / kept for key, prob in self.probabilities.items()}, 0.0
        )

    def total_count_law(self) -> PmfTable:
        """Law of |Ξ|; the truncated mass becomes the table's tail."""
        totals = self.support_matrix.sum(axis=1)
        size = int(totals.max(initial=0)) + 1
        probs = np.zeros(size)
        np.add.at(probs, totals, self.weights)
        return PmfTable(probs, self.truncated_mass)

    def marginal(self, atom: int) -> np.ndarray:
        """Law of Ξ({atom}) as an array over 0..max count."""
        column = self.support_matrix[:, atom]
        probs = np.zeros(int(column.max(initial=0)) + 1)
        np.add.at(probs, column, self.weights)
        return probs


# ---------------------------------------------------------------------------
# Intensity and Palm laws
# ---------------------------------------------------------------------------


def intensity(dist: ConfigDistribution) -> np.ndarray:
    """λ(a) = Σ_ξ P(ξ) ξ(a) for every atom a."""
    if not len(dist):
        return np.zeros(dist.atoms)
    return dist.weights @ dist.support_matrix


def palm(dist: ConfigDistribution, atom: int) -> ConfigDistribution:
    """Palm law Q_a(ξ) = P(ξ) ξ(a) / λ(a).

    Raises:
        PalmUndefinedError: If λ(a) = 0.
    """
    weighted = {key: prob * key[atom] for key, prob in dist.probabilities.items() if key[atom]}
    mass = math.fsum(weighted.values())
    if mass == 0.0:
        raise PalmUndefinedError(atom)
    return ConfigDistribution(dist.carrier, {key: w / mass for key, w in weighted.items()})


def reduced_palm(dist: ConfigDistribution, atom: int) -> ConfigDistribution:
    """Law of Ξ_a − δ_a."""
    return palm(dist, atom).shift(atom, -1)


def campbell_check(dist: ConfigDistribution, f: AtomFunction) -> tuple[float, float]:
    """Both sides of E Σ_a f(a, Ξ) Ξ(a) = Σ_a λ(a) E_{Q_a} f(a, ·).

    Returns:
        ``(lhs, rhs)``.
    """
    lhs = math.fsum(
        prob * f(a, key) * key[a]
        for key, prob in dist.probabilities.items()
        for a in range(dist.atoms)
        if key[a]
    )
    lam = intensity(dist)
    rhs = math.fsum(
        lam[a] * palm(dist, a).expectation(lambda xi, a=a: f(a, xi))
        for a in range(dist.atoms)
        if lam[a] > 0.0
    )
    return lhs, rhs


def _plus(key: Counts, atom: int, by: int = 1) -> Counts:
    moved = list(key)
    moved[atom] += by
    return tuple(moved)


def d_operator_expectation(
    dist: ConfigDistribution, f: AtomFunction, lam: Sequence[float] | None = None
) -> float:
    """E[Df(Ξ)] with Df(ξ) = Σ_a λ(a) f(a, ξ + δ_a) − Σ_a ξ(a) f(a, ξ).

    ``lam`` defaults to the intensity of ``dist``. It vanishes for every f
    exactly when the law is Poisson with mean measure λ.
    """
    rates = intensity(dist) if lam is None else np.asarray(lam, dtype=float)
    terms = []
    for key, prob in dist.probabilities.items():
        for a in range(dist.atoms):
            if rates[a]:
                terms.append(prob * rates[a] * f(a, _plus(key, a)))
            if key[a]:
                terms.append(-prob * key[a] * f(a, key))
    return math.fsum(terms)


def generator_expectation(
    dist: ConfigDistribution,
    h: Callable[[Counts], float],
    lam: Sequence[float] | None = None,
) -> float:
    """E[𝒜h(Ξ)] for the immigration-death generator with immigration λ."""
    rates = intensity(dist) if lam is None else np.asarray(lam, dtype=float)
    terms = []
    for key, prob in dist.probabilities.items():
        here = h(key)
        for a in range(dist.atoms):
            if rates[a]:
                terms.append(prob * rates[a] * (h(_plus(key, a)) - here))
            if key[a]:
                terms.append(prob * key[a] * (h(_plus(key, a, -1)) - here))
    return math.fsum(terms)


def difference_function(h: Callable[[Counts], float]) -> AtomFunction:
    """f(x, ξ) = h(ξ) − h(ξ − δ_x), taken as 0 when x is not a point of ξ."""

    def f(atom: int, key: Counts) -> float:
        if not key[atom]:
            return 0.0
        return h(key) - h(_plus(key, atom, -1))

    return f


def config_total_variation(first: ConfigDistribution, second: ConfigDistribution) -> float:
    """½ Σ|P − Q| with the two truncated masses compared as one extra outcome."""
    keys = set(first.probabilities) | set(second.probabilities)
    diff = math.fsum(abs(first.get(k) - second.get(k)) for k in keys)
    return 0.5 * (diff + abs(first.truncated_mass - second.truncated_mass))


@dataclass(frozen=True)
class LocalDependenceReport:
    """Outcome of comparing 𝓛(Ξ|_{A_a^c}) with 𝓛(Ξ_a|_{A_a^c}) atom by atom."""

    holds: bool
    max_discrepancy: float
    discrepancies: dict[int, float] = field(default_factory=dict)


def _neighbourhood(
    neighbourhoods: Mapping[int, Collection[int]] | Sequence[Collection[int]], a: int
) -> set[int]:
    hood = set(neighbourhoods[a])
    if a not in hood:
        raise DomainError(f"neighbourhood of atom {a} must contain it")
    return hood


def local_dependence_check(
    dist: ConfigDistribution,
    neighbourhoods: Mapping[int, Collection[int]] | Sequence[Collection[int]],
    tolerance: float = 1e-12,
) -> LocalDependenceReport:
    """Exact test of local dependence with the given neighbourhoods.

    Atoms with zero intensity are skipped; their Palm law does not exist.
    """
    lam = intensity(dist)
    found: dict[int, float] = {}
    for a in range(dist.atoms):
        hood = _neighbourhood(neighbourhoods, a)
        if lam[a] == 0.0:
            continue
        outside = [b for b in range(dist.atoms) if b not in hood]
        found[a] = config_total_variation(dist.restrict(outside), palm(dist, a).restrict(outside))
    worst = max(found.values(), default=0.0)
    return LocalDependenceReport(worst <= tolerance, worst, found)


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransportResult:
    """Optimal coupling of two discrete laws for a given ground cost.

    Attributes:
        value: Σ γ(i, j) c(i, j) at the optimum.
        coupling: The optimal coupling γ.
        dual_value: Σ a·u + Σ b·v for the dual potentials; equals ``value``
            up to solver round-off.
    """

    value: float
    coupling: np.ndarray
    dual_value: float


def transport(source: np.ndarray, target: np.ndarray, cost: np.ndarray) -> TransportResult:
    """Exact discrete optimal transport by network simplex.

    Both weight vectors are normalised to total 1 first.
    """
    a = np.asarray(source, dtype=np.float64)
    b = np.asarray(target, dtype=np.float64)
    a = a / math.fsum(a)
    b = b / math.fsum(b)
    m = np.ascontiguousarray(cost, dtype=np.float64)
    if a.size == 1 or b.size == 1:
        coupling = np.outer(a, b)
        value = math.fsum((coupling * m).ravel())
        return TransportResult(value, coupling, value)

    coupling, log = ot.emd(a, b, m, numItermax=EMD_MAX_ITERATIONS, log=True)
    if log.get("warning"):
        logger.warning("transport solver: %s", log["warning"], extra=log_fields(shape=m.shape))
    value = math.fsum((coupling * m).ravel())
    dual = math.fsum(a * log["u"]) + math.fsum(b * log["v"])
    logger.debug("transport solved", extra=log_fields(shape=m.shape, value=value))
    return TransportResult(value, coupling, dual)


def count_rho1(first: Counts, second: Counts, carrier: FiniteAtoms) -> float:
    """ρ₁ between two count vectors on a finite carrier."""
    m = sum(first)
    if m != sum(second):
        return 1.0
    if m == 0:
        return 0.0
    xs = [a for a, c in enumerate(first) for _ in range(c)]
    ys = [a for a, c in enumerate(second) for _ in range(c)]
    return assignment_cost(carrier.cost_matrix(xs, ys)) / m


def count_d1_prime(first: Counts, second: Counts, carrier: FiniteAtoms) -> float:
    """d′₁ between two count vectors on a finite carrier."""
    small, large = (first, second) if sum(first) <= sum(second) else (second, first)
    n, m = sum(small), sum(large)
    if n == 0:
        return float(m)
    xs = [a for a, c in enumerate(large) for _ in range(c)]
    ys = [a for a, c in enumerate(small) for _ in range(c)]
    return assignment_cost(carrier.cost_matrix(xs, ys)) + (m - n)


@dataclass(frozen=True)
class D2Result:
    """Exact d₂ between two (possibly truncated) laws.

    Attributes:
        value: d₂ between the normalised stored laws.
        lower: ``max(0, value − truncation)``.
        upper: ``min(1, value + truncation)``; the untruncated d₂ lies in
            ``[lower, upper]`` because ρ₁ ≤ 1.
        truncation: Sum of the two truncated masses.
        dual_value: Kantorovich dual value of the same problem.
    """

    value: float
    lower: float
    upper: float
    truncation: float
    dual_value: float


def _merge_by_total(
    dist: ConfigDistribution, totals: set[int]
) -> tuple[list[Counts | None], np.ndarray]:
    # configurations whose size never occurs on the other side are at ρ₁ = 1
    # from everything, so they collapse into a single row
    keys: list[Counts | None] = []
    weights: list[float] = []
    other = 0.0
    for key, prob in dist.probabilities.items():
        if sum(key) in totals:
            keys.append(key)
            weights.append(prob)
        else:
            other += prob
    if other > 0.0:
        keys.append(None)
        weights.append(other)
    return keys, np.array(weights)


def exact_d2(
    first: ConfigDistribution,
    second: ConfigDistribution,
    carrier: FiniteAtoms | None = None,
    max_cells: int = MAX_TRANSPORT_CELLS,
) -> D2Result:
    """d₂ as the optimal transport cost with ground cost ρ₁.

    Raises:
        DomainError: If the two laws live on different carriers.
        ResourceLimitError: If the reduced transport problem has more than
            ``max_cells`` cells.
    """
    space = first.carrier if carrier is None else carrier
    if first.carrier != space or second.carrier != space:
        raise DomainError("both distributions must live on the same carrier")
    truncation = first.truncated_mass + second.truncated_mass
    if not len(first) or not len(second):
        raise DomainError("cannot compare a distribution with empty stored support")

    totals_first = {sum(k) for k in first.probabilities}
    totals_second = {sum(k) for k in second.probabilities}
    rows, a = _merge_by_total(first, totals_second)
    cols, b = _merge_by_total(second, totals_first)
    if len(rows) * len(cols) > max_cells:
        raise ResourceLimitError(
            f"transport problem {len(rows)}x{len(cols)} exceeds {max_cells} cells"
        )

    cost = np.ones((len(rows), len(cols)))
    for i, x in enumerate(rows):
        for j, y in enumerate(cols):
            if x is not None and y is not None and sum(x) == sum(y):
                cost[i, j] = count_rho1(x, y, space)
    result = transport(a, b, cost)
    value = min(max(result.value, 0.0), 1.0)
    return D2Result(
        value=value,
        lower=max(0.0, value - truncation),
        upper=min(1.0, value + truncation),
        truncation=truncation,
        dual_value=result.dual_value,
    )


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def product_distribution(
    carrier: FiniteAtoms, marginals: Sequence[Sequence[float]]
) -> ConfigDistribution:
    """Independent counts per atom; marginal mass missing from the tables is truncated.

    Raises:
        ResourceLimitError: If the support would exceed :data:`MAX_SUPPORT`.
    """
    if len(marginals) != carrier.size:
        raise DomainError(f"{len(marginals)} marginals for {carrier.size} atoms")
    tables = [np.asarray(m, dtype=float) for m in marginals]
    choices = [[(c, float(p)) for c, p in enumerate(t) if p > 0.0] for t in tables]
    size = math.prod(len(c) for c in choices)
    if size > MAX_SUPPORT:
        raise ResourceLimitError(f"product support {size} exceeds {MAX_SUPPORT}")
    out: dict[Counts, float] = {}
    for combo in itertools.product(*choices):
        out[tuple(c for c, _ in combo)] = math.prod(p for _, p in combo)
    return ConfigDistribution(carrier, out, max(0.0, 1.0 - math.fsum(out.values())))


def poisson_caps(means: Sequence[float], tail: float | None = None) -> tuple[int, ...]:
    """Per-atom caps.

    ``⌈m + 12√m + 30⌉`` by default, or the smallest caps whose tail is at most
    ``tail / k`` each.
    """
    if tail is None:
        return tuple(default_cutoff(m) for m in means)
    share = tail / max(len(means), 1)
    caps = []
    for m in means:
        cap = 0
        while m > 0.0 and poisson.sf(cap, m) > share:
            cap += 1
        caps.append(cap)
    return tuple(caps)


def truncated_poisson_dist(
    means: Sequence[float], caps: Sequence[int], carrier: FiniteAtoms | None = None
) -> ConfigDistribution:
    """Independent Po(λ_a) counts truncated at ``caps[a]``.

    The truncated mass is 1 − Π_a P(Po(λ_a) ≤ cap_a).
    """
    space = FiniteAtoms.discrete(len(means)) if carrier is None else carrier
    if len(caps) != len(means):
        raise DomainError("one cap per atom is required")
    marginals = []
    for m, cap in zip(means, caps, strict=True):
        if m < 0.0 or cap < 0:
            raise DomainError(f"invalid mean {m} or cap {cap}")
        if m == 0.0:
            marginals.append([1.0])
        else:
            marginals.append(poisson.pmf(np.arange(cap + 1), m))
    return product_distribution(space, marginals)


def poisson_reference(dist: ConfigDistribution, tail: float = 1e-10) -> ConfigDistribution:
    """Truncated Po(λ) with λ the intensity of ``dist``, on the same carrier."""
    means = intensity(dist)
    return truncated_poisson_dist(means, poisson_caps(means, tail), dist.carrier)


def bernoulli_process_dist(
    p: BernoulliVector, carrier: FiniteAtoms | None = None
) -> ConfigDistribution:
    """Ξ = Σ X_i δ_{a_i} for independent X_i ~ Bernoulli(p_i), one atom each.

    Raises:
        ResourceLimitError: If n > 20.
        DomainError: If the carrier does not have n atoms.
    """
    n = len(p)
    if n > MAX_INDICATORS:
        raise ResourceLimitError(f"Bernoulli process limited to {MAX_INDICATORS} indicators")
    space = FiniteAtoms.discrete(n) if carrier is None else carrier
    if space.size != n:
        raise DomainError(f"{n} indicators on a carrier with {space.size} atoms")
    return product_distribution(space, [[1.0 - q, q] for q in p.p])


def indicator_table_dist(carrier: FiniteAtoms, table: Mapping[Counts, float]) -> ConfigDistribution:
    """Law given by an explicit joint table of 0/1 indicators, one per atom."""
    for key in table:
        if any(c not in (0, 1) for c in key):
            raise DomainError(f"{key!r} is not a 0/1 vector")
    return ConfigDistribution(carrier, table)


def convolve(first: ConfigDistribution, second: ConfigDistribution) -> ConfigDistribution:
    """Law of Ξ₁ + Ξ₂ for independent Ξ₁, Ξ₂ on the same carrier."""
    if first.carrier != second.carrier:
        raise DomainError("both distributions must live on the same carrier")
    if len(first) * len(second) > MAX_SUPPORT:
        raise ResourceLimitError("convolution support exceeds the cap")
    out: dict[Counts, float] = defaultdict(float)
    for (x, p), (y, q) in itertools.product(first, second):
        out[tuple(i + j for i, j in zip(x, y, strict=True))] += p * q
    kept = (1.0 - first.truncated_mass) * (1.0 - second.truncated_mass)
    return ConfigDistribution(first.carrier, out, max(0.0, 1.0 - kept))


def lift_independent(components: Sequence[ConfigDistribution]) -> ConfigDistribution:
    """Joint law of independent components, component i placed in label block i.

    All components share one base carrier; the result lives on the flattened
    lifted carrier (label-major atoms).
    """
    if not components:
        raise DomainError("need at least one component")
    base = components[0].carrier
    if any(c.carrier != base for c in components):
        raise DomainError("components must share a base carrier")
    lifted = Lifted(len(components), base).to_finite()
    size = math.prod(len(c) for c in components)
    if size > MAX_SUPPORT:
        raise ResourceLimitError(f"lifted support {size} exceeds {MAX_SUPPORT}")
    out: dict[Counts, float] = {}
    for combo in itertools.product(*components):
        key = tuple(c for counts, _ in combo for c in counts)
        out[key] = math.prod(p for _, p in combo)
    kept = math.prod(1.0 - c.truncated_mass for c in components)
    return ConfigDistribution(lifted, out, max(0.0, 1.0 - kept))


def project_labels(dist: ConfigDistribution, base: FiniteAtoms) -> ConfigDistribution:
    """Law of the label-free projection of a lifted process onto ``base``."""
    k = base.size
    if dist.carrier.component_of is None or dist.atoms % k:
        raise DomainError("distribution does not live on a lifted carrier over this base")
    out: dict[Counts, float] = defaultdict(float)
    for key, prob in dist:
        folded = [0] * k
        for atom, count in enumerate(key):
            folded[atom % k] += count
        out[tuple(folded)] += prob
    return ConfigDistribution(base, out, dist.truncated_mass)


def component_block(dist: ConfigDistribution, label: int) -> list[int]:
    """Atoms of the lifted carrier that carry ``label``."""
    components = dist.carrier.component_of
    if components is None:
        raise DomainError("distribution does not live on a lifted carrier")
    return [a for a, c in enumerate(components) if c == label]


# ---------------------------------------------------------------------------
# Discrete renewal processes
# ---------------------------------------------------------------------------


def _slot_pmf(name: str, pmf: Sequence[float]) -> np.ndarray:
    values = np.asarray(pmf, dtype=float)
    if np.any(values < 0.0) or math.fsum(values) > 1.0 + MASS_TOLERANCE:
        raise DomainError(f"{name} must be a (possibly defective) pmf on slots 1..m")
    return values


def discrete_renewal_dist(
    first: Sequence[float],
    gap: Sequence[float],
    slots: int,
    carrier: FiniteAtoms | None = None,
) -> ConfigDistribution:
    """Exact law of the arrival indicators of a discrete renewal process.

    ``first[j]`` and ``gap[j]`` are the probabilities of the value ``j + 1``;
    missing mass means "never". Every arrival path inside slots 1..T is
    enumerated with the probability that the next arrival falls beyond T.

    Raises:
        ResourceLimitError: If T > 20.
    """
    if slots > MAX_SLOTS:
        raise ResourceLimitError(f"renewal enumeration limited to {MAX_SLOTS} slots")
    g = _slot_pmf("first-arrival law", first)
    f = _slot_pmf("gap law", gap)
    space = slot_carrier(slots) if carrier is None else carrier
    if space.size != slots:
        raise DomainError(f"carrier has {space.size} atoms for {slots} slots")

    def law(values: np.ndarray, t: int) -> float:
        return float(values[t - 1]) if 1 <= t <= values.size else 0.0

    def beyond(values: np.ndarray, horizon: int) -> float:
        return max(0.0, 1.0 - math.fsum(law(values, t) for t in range(1, horizon + 1)))

    out: dict[Counts, float] = defaultdict(float)
    stack: list[tuple[int, tuple[int, ...], float]] = []
    for s in range(1, slots + 1):
        if law(g, s) > 0.0:
            stack.append((s, (s,), law(g, s)))
    empty = beyond(g, slots)
    if empty > 0.0:
        out[(0,) * slots] += empty
    while stack:
        last, arrivals, prob = stack.pop()
        stop = beyond(f, slots - last)
        if stop > 0.0:
            out[tuple(1 if t in arrivals else 0 for t in range(1, slots + 1))] += prob * stop
        for step in range(1, slots - last + 1):
            if law(f, step) > 0.0:
                stack.append((last + step, (*arrivals, last + step), prob * law(f, step)))
    stored = math.fsum(out.values())
    return ConfigDistribution(space, out, max(0.0, 1.0 - stored) if stored < 1.0 else 0.0)


def renewal_density(first: Sequence[float], gap: Sequence[float], slots: int) -> np.ndarray:
    """u(t) = P(arrival in slot t) from u = g + u * f, for t = 1..T."""
    g = _slot_pmf("first-arrival law", first)
    f = _slot_pmf("gap law", gap)
    u = np.zeros(slots + 1)
    for t in range(1, slots + 1):
        direct = g[t - 1] if t <= g.size else 0.0
        renewed = math.fsum(u[s] * f[t - s - 1] for s in range(1, t) if t - s <= f.size)
        u[t] = direct + renewed
    return u[1:]
