"""Error bounds for Poisson process approximation.

Each evaluator returns a :class:`BoundReport`. Exact evaluators enumerate
finite laws from :mod:`stein_poisson.palmexact`; Monte Carlo evaluators take
a seed and report a standard error for every estimated term. A bound whose
formula breaks down (a non-positive denominator, zero total intensity) comes
back with ``valid=False`` and a reason instead of raising.
"""

from __future__ import annotations

import json
import math
from collections.abc import Collection, Mapping, Sequence
from dataclasses import asdict, dataclass, field
from typing import Any, Literal, Protocol

import numpy as np

from .errors import ConfigurationError, DomainError
from .imdeath import stein_factor_bound
from .logging import get_logger, log_fields
from .models import MarkedBernoulliSpec, MaternModel, MaternSpec, RenewalComponent
from .montecarlo import summarize
from .palmexact import (
    ConfigDistribution,
    Counts,
    component_block,
    count_d1_prime,
    intensity,
    local_dependence_check,
    palm,
    transport,
)
from .rng import SeedLike, replication_chunks, spawn
from .univariate import BernoulliVector, expected_reciprocal_count

logger = get_logger(__name__)

__all__ = [
    "BoundReport",
    "Eq7Bounds",
    "IndependentIndicatorCoupling",
    "bound_corollary52",
    "bound_corollary53",
    "bound_eq7",
    "bound_theorem41",
    "bound_theorem41_exact",
    "bound_theorem41_mc",
    "bound_theorem51",
    "bound_theorem51_exact",
    "bound_theorem51_mc",
    "corollary53_from_components",
    "lifted_neighbourhoods",
    "matern_scaling_study",
    "stein_factor_bound",
]

Mode = Literal["exact", "monte-carlo"]
CONFIDENCE_SE = 3.0


@dataclass(frozen=True)
class BoundReport:
    """Value of one error bound and how it was obtained.

    Attributes:
        name: Which bound.
        value: Point value, ``None`` when the bound is invalid.
        lower: Lower end of the reported interval (``value − 3 SE`` for Monte
            Carlo, equal to ``value`` for exact evaluations).
        upper: Upper end of the interval.
        terms: Named component terms.
        standard_errors: Standard error per Monte Carlo term.
        mode: ``"exact"`` or ``"monte-carlo"``.
        valid: False when the formula does not apply.
        reason: Why the bound is invalid, if it is.
        coupling: Coupling used for terms that need one.
        notes: Free-form remarks (warnings raised during evaluation).
    """

    name: str
    value: float | None
    lower: float | None = None
    upper: float | None = None
    terms: dict[str, float] = field(default_factory=dict)
    standard_errors: dict[str, float] = field(default_factory=dict)
    mode: Mode = "exact"
    valid: bool = True
    reason: str = ""
    coupling: str | None = None
    notes: tuple[str, ...] = ()

    @classmethod
    def exact(cls, name: str, value: float, terms: dict[str, float], **extra: Any) -> BoundReport:
        return cls(name, value, value, value, terms, {}, "exact", **extra)

    @classmethod
    def invalid(cls, name: str, reason: str, mode: Mode = "exact", **extra: Any) -> BoundReport:
        return cls(name, None, None, None, mode=mode, valid=False, reason=reason, **extra)

    @property
    def standard_error(self) -> float:
        """Combined standard error of the estimated terms."""
        return math.sqrt(math.fsum(se * se for se in self.standard_errors.values()))

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["notes"] = list(self.notes)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _psi(lam: float, size: float) -> float:
    return 3.5 / lam + 2.5 / (size + 1.0)


# ---------------------------------------------------------------------------
# Independent indicators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Eq7Bounds:
    """Sharp and crude forms of the Bernoulli-process bound."""

    sharp: BoundReport
    crude: BoundReport


def bound_eq7(p: BernoulliVector) -> Eq7Bounds:
    """Bounds for Ξ = Σ X_i δ_{a_i} with independent X_i ~ Bernoulli(p_i).

    sharp = Σ p_i² (3.5/λ + 2.5 E[1/(Σ_{j≠i} X_j + 1)]) with the expectation
    integrated exactly; crude = 6 Σ p_i² / (λ − max p_i), valid only when
    λ > max p_i.

    Examples:
        >>> round(bound_eq7(BernoulliVector((0.1, 0.1))).crude.value, 9)
        1.2
    """
    lam, squares = p.lam, p.sum_squares
    terms = {"sum_p_squared": squares, "lam": lam}
    if lam == 0.0:
        sharp = BoundReport.exact("eq7-sharp", 0.0, terms, notes=("all p_i are 0",))
    else:
        parts = [
            q * q * _psi_reciprocal(lam, expected_reciprocal_count(p, i))
            for i, q in enumerate(p.p)
            if q > 0.0
        ]
        sharp = BoundReport.exact("eq7-sharp", math.fsum(parts), terms)
    gap = lam - p.max_p
    if gap <= 0.0:
        crude = BoundReport.invalid("eq7-crude", f"λ − max p_i = {gap:.6g} is not positive")
    else:
        crude = BoundReport.exact("eq7-crude", 6.0 * squares / gap, terms)
    return Eq7Bounds(sharp, crude)


def _psi_reciprocal(lam: float, reciprocal: float) -> float:
    return 3.5 / lam + 2.5 * reciprocal


# ---------------------------------------------------------------------------
# Locally dependent processes
# ---------------------------------------------------------------------------


def bound_theorem41_exact(
    dist: ConfigDistribution,
    neighbourhoods: Mapping[int, Collection[int]] | Sequence[Collection[int]],
    check_local_dependence: bool = True,
) -> BoundReport:
    """Locally dependent bound evaluated by enumeration.

    first  = E Σ_α Ξ(α) ψ(|Ξ|_{A_α^c}|) (Ξ(A_α) − 1)
    second = Σ_α Σ_{β ∈ A_α} λ(α) λ(β) E ψ(|Ξ_β|_{A_α^c}|)

    with ψ(s) = 3.5/λ + 2.5/(s + 1) and Ξ_β the Palm process at β.
    """
    name = "theorem41"
    lam_atoms = intensity(dist)
    lam = math.fsum(lam_atoms)
    if lam == 0.0:
        return BoundReport.invalid(name, "total intensity is zero")
    hoods = [set(neighbourhoods[a]) for a in range(dist.atoms)]
    if check_local_dependence:
        report = local_dependence_check(dist, neighbourhoods)
        if not report.holds:
            return BoundReport.invalid(
                name, f"local dependence fails (discrepancy {report.max_discrepancy:.3g})"
            )

    first_terms = []
    for key, prob in dist:
        total = sum(key)
        for a, count in enumerate(key):
            if not count:
                continue
            inside = sum(key[b] for b in hoods[a])
            first_terms.append(prob * count * _psi(lam, total - inside) * (inside - 1))
    first = math.fsum(first_terms)

    palms = {b: palm(dist, b) for b in range(dist.atoms) if lam_atoms[b] > 0.0}
    second_terms = []
    for a in range(dist.atoms):
        if lam_atoms[a] == 0.0:
            continue
        outside = [x for x in range(dist.atoms) if x not in hoods[a]]
        for b in hoods[a]:
            if b not in palms:
                continue
            mean_psi = palms[b].expectation(
                lambda xi, keep=outside: _psi(lam, sum(xi[x] for x in keep))
            )
            second_terms.append(lam_atoms[a] * lam_atoms[b] * mean_psi)
    second = math.fsum(second_terms)
    notes = ("truncated input law",) if dist.truncated_mass else ()
    return BoundReport.exact(
        name, first + second, {"first": first, "second": second, "lam": lam}, notes=notes
    )


class LocallyDependentModel(Protocol):
    """What the Monte Carlo locally dependent bound needs from a model."""

    def total_intensity(self) -> float: ...

    def sample(self, rng: np.random.Generator) -> np.ndarray: ...

    def neighbourhood_mask(self, alpha: np.ndarray, coords: np.ndarray) -> np.ndarray: ...

    def sample_neighbour_pair(
        self, rng: np.random.Generator
    ) -> tuple[np.ndarray, np.ndarray, float]: ...

    def sample_reduced_palm(self, beta: np.ndarray, rng: np.random.Generator) -> np.ndarray: ...


def bound_theorem41_mc(model: LocallyDependentModel, reps: int, seed: SeedLike) -> BoundReport:
    """Monte Carlo evaluation of the locally dependent bound.

    The first term averages over samples of Ξ. The second term draws
    (α, β ∈ A_α) from an importance sampler of λ(dα)λ(dβ) and a reduced
    Palm sample at β; the point β itself lies in A_α, so the reduced and the
    full Palm process agree outside A_α. The report also carries the
    neighbourhood mass ∫∫_{β ∈ A_α} λ(dα)λ(dβ).
    """
    name = "theorem41"
    lam = model.total_intensity()
    if lam <= 0.0:
        return BoundReport.invalid(name, "total intensity is zero", mode="monte-carlo")

    first_values = []
    for rng, count in replication_chunks(spawn(seed, 0), reps):
        for _ in range(count):
            coords = model.sample(rng)
            n = len(coords)
            acc = []
            for i in range(n):
                inside = int(model.neighbourhood_mask(coords[i], coords).sum())
                if inside > 1:
                    acc.append(_psi(lam, n - inside) * (inside - 1))
            first_values.append(math.fsum(acc))

    second_values, mass_values = [], []
    for rng, count in replication_chunks(spawn(seed, 1), reps):
        for _ in range(count):
            alpha, beta, weight = model.sample_neighbour_pair(rng)
            reduced = model.sample_reduced_palm(beta, rng)
            outside = int(len(reduced) - model.neighbourhood_mask(alpha, reduced).sum())
            second_values.append(weight * _psi(lam, outside))
            mass_values.append(weight)

    first = summarize(first_values)
    second = summarize(second_values)
    mass = summarize(mass_values)
    total = first + second
    logger.info(
        "locally dependent bound estimated",
        extra=log_fields(reps=reps, value=total.estimate, se=total.standard_error),
    )
    return BoundReport(
        name,
        total.estimate,
        max(0.0, total.estimate - CONFIDENCE_SE * total.standard_error),
        total.estimate + CONFIDENCE_SE * total.standard_error,
        {
            "first": first.estimate,
            "second": second.estimate,
            "neighbourhood_mass": mass.estimate,
            "lam": lam,
        },
        {
            "first": first.standard_error,
            "second": second.standard_error,
            "neighbourhood_mass": mass.standard_error,
        },
        "monte-carlo",
    )


def bound_theorem41(
    source: ConfigDistribution | LocallyDependentModel,
    neighbourhoods: Mapping[int, Collection[int]] | Sequence[Collection[int]] | None = None,
    *,
    reps: int = 10_000,
    seed: SeedLike | None = None,
) -> BoundReport:
    """Locally dependent bound: exact for a finite law, Monte Carlo for a model."""
    if isinstance(source, ConfigDistribution):
        if neighbourhoods is None:
            raise ConfigurationError("neighbourhoods", "exact mode needs neighbourhoods A_a")
        return bound_theorem41_exact(source, neighbourhoods)
    if seed is None:
        raise ConfigurationError("monte_carlo.seed", "a seed is required in Monte Carlo mode")
    return bound_theorem41_mc(source, reps, seed)


# ---------------------------------------------------------------------------
# Marked Bernoulli processes
# ---------------------------------------------------------------------------


def bound_corollary52(
    spec: MarkedBernoulliSpec,
    mode: Mode = "exact",
    reps: int = 10_000,
    seed: SeedLike | None = None,
) -> BoundReport:
    """Bound for Ξ = Σ I_i δ_{U_i} with locally dependent indicators.

    first  = E Σ_i Σ_{j ∈ A_i∖{i}} (3.5/λ + 2.5/(V_i + 1)) I_i I_j
    second = Σ_i Σ_{j ∈ A_i} (3.5/λ + E[2.5/(V_i + 1) | I_j = 1]) p_i p_j

    with V_i = Σ_{j ∉ A_i} I_j. A null conditioning event (p_j = 0) leaves
    only the 3.5/λ part, which is then multiplied by p_j = 0.
    """
    name = "corollary52"
    if mode not in ("exact", "monte-carlo"):
        raise ConfigurationError("mode", f"unknown mode {mode!r}")
    hoods = [set(h) for h in spec.neighbourhoods or ()]
    p = spec.indicators.marginals()
    lam = math.fsum(p)
    if lam == 0.0:
        return BoundReport.invalid(name, "total intensity is zero", mode=mode)
    n = spec.size
    notes = []
    for j in range(n):
        if p[j] == 0.0 and any(j in hood for hood in hoods):
            notes.append(f"p_{j} = 0: conditional expectation given I_{j} = 1 skipped")
            logger.warning("null conditioning event for indicator %d", j)

    def first_value(bits: Sequence[int]) -> float:
        out = []
        for i in range(n):
            if not bits[i]:
                continue
            v = sum(bits[j] for j in range(n) if j not in hoods[i])
            out.extend(_psi(lam, v) for j in hoods[i] if j != i and bits[j])
        return math.fsum(out)

    def second_value(bits: Sequence[int]) -> float:
        # p_i p_j E[2.5/(V_i+1) | I_j = 1] = p_i E[2.5 I_j/(V_i+1)]
        out = []
        for i in range(n):
            v = sum(bits[j] for j in range(n) if j not in hoods[i])
            for j in hoods[i]:
                out.append(p[i] * (3.5 / lam * p[j] + 2.5 * bits[j] / (v + 1.0)))
        return math.fsum(out)

    if mode == "exact":
        table = spec.indicators.table()
        first = math.fsum(prob * first_value(bits) for bits, prob in table.items())
        second = math.fsum(prob * second_value(bits) for bits, prob in table.items())
        return BoundReport.exact(
            name, first + second, {"first": first, "second": second, "lam": lam}, notes=tuple(notes)
        )

    if seed is None:
        raise ConfigurationError("monte_carlo.seed", "a seed is required in Monte Carlo mode")
    firsts, seconds = [], []
    for rng, count in replication_chunks(seed, reps):
        for _ in range(count):
            bits = [int(b) for b in spec.indicators.sample(rng)]
            firsts.append(first_value(bits))
            seconds.append(second_value(bits))
    f_est, s_est = summarize(firsts), summarize(seconds)
    total = f_est + s_est
    return BoundReport(
        name,
        total.estimate,
        max(0.0, total.estimate - CONFIDENCE_SE * total.standard_error),
        total.estimate + CONFIDENCE_SE * total.standard_error,
        {"first": f_est.estimate, "second": s_est.estimate, "lam": lam},
        {"first": f_est.standard_error, "second": s_est.standard_error},
        "monte-carlo",
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# Locally dependent superpositions
# ---------------------------------------------------------------------------


def lifted_neighbourhoods(
    dist: ConfigDistribution, label_neighbourhoods: Sequence[Collection[int]]
) -> list[set[int]]:
    """Atom neighbourhoods on a lifted carrier from label neighbourhoods A_i."""
    components = dist.carrier.component_of
    if components is None:
        raise DomainError("distribution does not live on a lifted carrier")
    label_hoods = [set(hood) for hood in label_neighbourhoods]
    return [
        {b for b, c in enumerate(components) if c in label_hoods[label]} for label in components
    ]


def _blocks(dist: ConfigDistribution, labels: Collection[int]) -> list[int]:
    return sorted(a for label in labels for a in component_block(dist, label))


def _marginal_on(dist: ConfigDistribution, atoms: Sequence[int]) -> Mapping[Counts, float]:
    return dist.restrict(atoms).probabilities


def _weighted_transport(
    source: Mapping[Counts, float],
    target: Mapping[Counts, float],
    dist: ConfigDistribution,
    weight: Mapping[Counts, float] | None = None,
) -> float:
    rows, cols = list(source), list(target)
    cost = np.array([[count_d1_prime(x, y, dist.carrier) for y in cols] for x in rows])
    if weight is not None:
        cost *= np.array([weight[x] for x in rows])[:, None]
    a = np.array([source[x] for x in rows])
    b = np.array([target[y] for y in cols])
    return transport(a, b, cost).value


def bound_theorem51_exact(
    dist: ConfigDistribution, label_neighbourhoods: Sequence[Collection[int]]
) -> BoundReport:
    """Superposition bound on a joint law over a lifted carrier.

    Component Ξ_i is the label-i block. Couplings are not fixed by the
    bound itself; here V_{i,α} is taken conditionally independent of Ξ^{(i)}
    given V_i, (V_i, V_{i,α}) is coupled optimally for the cost
    E[ψ(|Ξ^{(i)}|) | V_i = v] d′₁(v, v′), and (Ξ_i, Ξ_{i,α}) optimally for
    d′₁. Any coupling gives a valid bound, so these give the smallest value
    of the expression under that convention.
    """
    name = "theorem51"
    components = dist.carrier.component_of
    if components is None:
        raise DomainError("the superposition bound needs a law on a lifted carrier")
    law = dist.normalized() if dist.truncated_mass else dist
    labels = sorted(set(components))
    if len(label_neighbourhoods) != len(labels):
        raise DomainError(
            f"{len(label_neighbourhoods)} neighbourhoods for {len(labels)} components"
        )
    lam_atoms = intensity(law)
    lam = math.fsum(lam_atoms)
    if lam == 0.0:
        return BoundReport.invalid(name, "total intensity is zero")

    first_terms, second_terms = [], []
    for i in labels:
        hood = set(label_neighbourhoods[i])
        if i not in hood:
            raise DomainError(f"neighbourhood of component {i} must contain it")
        own = component_block(law, i)
        v_atoms = _blocks(law, hood - {i})
        out_atoms = set(range(law.atoms)) - set(_blocks(law, hood))

        v_keep = set(v_atoms)
        v_law = _marginal_on(law, v_atoms)
        xi_law = _marginal_on(law, own)
        joint: dict[Counts, float] = {}
        mean_reciprocal = []
        for key, prob in law:
            v = tuple(c if a in v_keep else 0 for a, c in enumerate(key))
            outside = sum(key[a] for a in out_atoms)
            joint[v] = joint.get(v, 0.0) + prob * _psi(lam, outside)
            mean_reciprocal.append(prob * 2.5 / (outside + 1.0))
        psi_given_v = {v: joint[v] / v_law[v] for v in v_law}
        factor = 3.5 / lam + math.fsum(mean_reciprocal)

        for alpha in own:
            if lam_atoms[alpha] == 0.0:
                continue
            palm_law = palm(law, alpha)
            v_palm = _marginal_on(palm_law, v_atoms)
            v_cost = _weighted_transport(v_law, v_palm, law, psi_given_v)
            first_terms.append(lam_atoms[alpha] * v_cost)
            reduced = _marginal_on(palm_law.shift(alpha, -1), own)
            xi_cost = _weighted_transport(xi_law, reduced, law)
            second_terms.append(factor * lam_atoms[alpha] * xi_cost)

    first, second = math.fsum(first_terms), math.fsum(second_terms)
    notes: tuple[str, ...] = ()
    if dist.truncated_mass:
        notes = (f"truncated mass {dist.truncated_mass:.3g} renormalised",)
    return BoundReport.exact(
        name,
        first + second,
        {"first": first, "second": second, "lam": lam},
        coupling="optimal (d'1-transport); V_i,alpha conditionally independent of Xi^(i) given V_i",
        notes=notes,
    )


@dataclass(frozen=True)
class ComponentDraw:
    """One replication's contribution of component i under a joint coupling.

    Attributes:
        outside: |Ξ^{(i)}|.
        v_cost: ∫ d′₁(V_i, V_{i,α}) λ_i(dα) under the coupling.
        xi_cost: ∫ d′₁(Ξ_i, Ξ_{i,α}) λ_i(dα) under the coupling.
    """

    outside: int
    v_cost: float
    xi_cost: float


class SuperpositionCoupling(Protocol):
    """Joint sampler of the quantities in the superposition bound."""

    name: str

    def total_intensity(self) -> float: ...

    def draw(self, rng: np.random.Generator) -> list[ComponentDraw]: ...


@dataclass(frozen=True)
class IndependentIndicatorCoupling:
    """Reference coupling for Σ I_i δ_{U_i} with independent indicators, A_i = {i}.

    V_i is empty and the reduced Palm process of I_i δ_{U_i} is empty, so
    ∫ d′₁(Ξ_i, Ξ_{i,α}) λ_i(dα) = p_i I_i.
    """

    p: BernoulliVector
    name: str = "independent-indicators"

    def total_intensity(self) -> float:
        return self.p.lam

    def draw(self, rng: np.random.Generator) -> list[ComponentDraw]:
        bits = (rng.random(len(self.p)) < np.asarray(self.p.p)).astype(int)
        total = int(bits.sum())
        return [
            ComponentDraw(total - int(b), 0.0, q * int(b))
            for q, b in zip(self.p.p, bits, strict=True)
        ]


def bound_theorem51_mc(
    coupling: SuperpositionCoupling | None, reps: int, seed: SeedLike
) -> BoundReport:
    """Monte Carlo evaluation of the superposition bound under a user coupling.

    The second term is a sum of products of two expectations; its standard
    error comes from the delta method.

    Raises:
        ConfigurationError: If no coupling is given.
    """
    name = "theorem51"
    if coupling is None:
        raise ConfigurationError("coupling", "Monte Carlo mode needs an explicit coupling")
    lam = coupling.total_intensity()
    if lam <= 0.0:
        return BoundReport.invalid(name, "total intensity is zero", mode="monte-carlo")

    first_values: list[float] = []
    factors: list[np.ndarray] = []
    costs: list[np.ndarray] = []
    for rng, count in replication_chunks(seed, reps):
        for _ in range(count):
            draws = coupling.draw(rng)
            first_values.append(math.fsum(_psi(lam, d.outside) * d.v_cost for d in draws))
            factors.append(np.array([3.5 / lam + 2.5 / (d.outside + 1.0) for d in draws]))
            costs.append(np.array([d.xi_cost for d in draws]))
    a = np.vstack(factors)
    b = np.vstack(costs)
    a_mean, b_mean = a.mean(axis=0), b.mean(axis=0)
    second = float(np.dot(a_mean, b_mean))
    influence = (a - a_mean) @ b_mean + (b - b_mean) @ a_mean
    second_se = 0.0
    if len(influence) > 1:
        second_se = float(np.std(influence, ddof=1) / math.sqrt(len(influence)))
    first = summarize(first_values)
    value = first.estimate + second
    se = math.hypot(first.standard_error, second_se)
    return BoundReport(
        name,
        value,
        max(0.0, value - CONFIDENCE_SE * se),
        value + CONFIDENCE_SE * se,
        {"first": first.estimate, "second": second, "lam": lam},
        {"first": first.standard_error, "second": second_se},
        "monte-carlo",
        coupling=coupling.name,
    )


def bound_theorem51(
    source: ConfigDistribution | SuperpositionCoupling | None,
    label_neighbourhoods: Sequence[Collection[int]] | None = None,
    *,
    reps: int = 10_000,
    seed: SeedLike | None = None,
) -> BoundReport:
    """Superposition bound: exact on a lifted joint law, Monte Carlo under a coupling."""
    if isinstance(source, ConfigDistribution):
        if label_neighbourhoods is None:
            raise ConfigurationError("neighbourhoods", "exact mode needs component neighbourhoods")
        return bound_theorem51_exact(source, label_neighbourhoods)
    if seed is None:
        raise ConfigurationError("monte_carlo.seed", "a seed is required in Monte Carlo mode")
    return bound_theorem51_mc(source, reps, seed)


def bound_corollary53(first_cdfs: Sequence[float], gap_cdfs: Sequence[float]) -> BoundReport:
    """Closed-form bound for a superposition of independent renewal processes.

    6 Σ (2F_i + G_i) G_i / (1 − F_i)² divided by Σ G_i − max_j G_j / (1 − F_j),
    with G_i = G_i(T) and F_i = F_i(T).

    Examples:
        >>> round(bound_corollary53([0.1, 0.1], [0.1, 0.1]).value, 9)
        5.0
    """
    name = "corollary53"
    if len(first_cdfs) != len(gap_cdfs) or not first_cdfs:
        raise DomainError("need one G_i(T) and one F_i(T) per component")
    g = [float(v) for v in first_cdfs]
    f = [float(v) for v in gap_cdfs]
    if any(not 0.0 <= v <= 1.0 for v in g + f):
        raise DomainError("G_i(T) and F_i(T) must lie in [0, 1]")
    if any(v == 1.0 for v in f):
        return BoundReport.invalid(name, "F_i(T) = 1 for some component")
    pairs = list(zip(g, f, strict=True))
    numerator = 6.0 * math.fsum((2.0 * fi + gi) * gi / (1.0 - fi) ** 2 for gi, fi in pairs)
    denominator = math.fsum(g) - max(gi / (1.0 - fi) for gi, fi in pairs)
    terms = {"numerator": numerator, "denominator": denominator}
    if denominator <= 0.0:
        return BoundReport.invalid(
            name,
            f"denominator Σ G_i − max G_j/(1 − F_j) = {denominator:.6g} is not positive",
            terms=terms,
        )
    return BoundReport.exact(name, numerator / denominator, terms)


def corollary53_from_components(
    components: Sequence[RenewalComponent], horizon: float
) -> BoundReport:
    """:func:`bound_corollary53` with G_i(T) and F_i(T) read off the laws."""
    return bound_corollary53(
        [c.first.cdf(horizon) for c in components], [c.gap.cdf(horizon) for c in components]
    )


# ---------------------------------------------------------------------------
# Matérn order study
# ---------------------------------------------------------------------------

DEFAULT_SCALING_RADII = (0.00025, 0.0005, 0.001, 0.002)


@dataclass(frozen=True)
class ScalingStudy:
    """Monte Carlo bound per radius and the fitted log-log slope."""

    radii: tuple[float, ...]
    reports: tuple[BoundReport, ...]
    slope: float
    intercept: float


def matern_scaling_study(
    nu: float = 50.0,
    dimension: int = 1,
    radii: Sequence[float] = DEFAULT_SCALING_RADII,
    reps: int = 2000,
    seed: SeedLike = 0,
) -> ScalingStudy:
    """Evaluate the Matérn bound over a grid of radii and fit log(bound) against log(r).

    The bound is of order (2r)^d, so the slope should be close to d as long
    as ν·2r stays small; for larger radii the thinning factor e^{−ν Vol}
    bends the curve.
    """
    if len(radii) < 2:
        raise DomainError("need at least two radii to fit a slope")
    reports = []
    for k, r in enumerate(radii):
        if not 0.0 < 2.0 * r < 0.5:
            raise DomainError(f"radius {r} is too large for neighbourhoods B(α, 2r)")
        model = MaternModel(MaternSpec(nu, r, dimension))
        reports.append(bound_theorem41_mc(model, reps, spawn(seed, k)))
    values = np.array([rep.value for rep in reports], dtype=float)
    slope, intercept = np.polyfit(np.log(np.asarray(radii)), np.log(values), 1)
    logger.info("scaling slope fitted", extra=log_fields(slope=float(slope), radii=list(radii)))
    return ScalingStudy(tuple(radii), tuple(reports), float(slope), float(intercept))
