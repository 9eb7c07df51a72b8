"""Self-checks behind ``stein-poisson verify``.

Each suite runs a handful of checks against closed forms, brute-force
oracles or exact enumeration and reports pass/fail per check. ``full=True``
uses acceptance-scale sample sizes; the default sizes finish in seconds.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from scipy import stats
from scipy.spatial import cKDTree

from .bounds import (
    DEFAULT_SCALING_RADII,
    bound_corollary52,
    bound_corollary53,
    bound_eq7,
    bound_theorem41_exact,
    bound_theorem51_exact,
    lifted_neighbourhoods,
    matern_scaling_study,
)
from .carrier import (
    Configuration,
    FiniteAtoms,
    Interval,
    brute_force_d1_prime,
    brute_force_rho1,
    d1_prime,
    random_configuration,
    rho1,
)
from .errors import DomainError
from .imdeath import (
    AnchorTestFunction,
    DiscreteIntensity,
    estimate_second_difference,
    simulate_spatial_imdeath,
    stein_factor_bound,
)
from .logging import get_logger
from .models import (
    IndependentIndicators,
    MarkedBernoulliSpec,
    MaternModel,
    MaternSpec,
    matern_mean_count,
)
from .montecarlo import summarize
from .palmexact import (
    ConfigDistribution,
    bernoulli_process_dist,
    campbell_check,
    config_total_variation,
    discrete_renewal_dist,
    exact_d2,
    lift_independent,
    local_dependence_check,
    palm,
    poisson_caps,
    poisson_reference,
    product_distribution,
    project_labels,
    truncated_poisson_dist,
)
from .rng import replication_chunks, spawn, spawn_generator
from .univariate import (
    check_delta_bound,
    order_ratio_study,
    random_bernoulli_vector,
    stein_solution_probabilistic,
    stein_solution_recursive,
)

logger = get_logger(__name__)

SUITES = ("univariate", "metrics", "palm", "imdeath", "models", "bounds")
SCALING_SLOPE_TOLERANCE = 0.2


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check."""

    name: str
    passed: bool
    detail: str = ""
    metrics: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SuiteReport:
    """All checks of one suite."""

    suite: str
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict[str, Any]:
        checks = [asdict(c) for c in self.checks]
        return {"suite": self.suite, "passed": self.passed, "checks": checks}


def _scale(full: bool, quick: int, acceptance: int) -> int:
    return acceptance if full else quick


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------


def _univariate(seed: int, full: bool) -> list[CheckResult]:
    checks = []
    for lam in (0.5, 1.0, 2.0, 5.0):
        report = check_delta_bound(lam, 10)
        checks.append(
            CheckResult(
                f"delta-bound lam={lam}",
                report.passed,
                f"{report.subsets} subsets",
                {"max_ratio": report.max_ratio, "max_residual": report.max_residual},
            )
        )

    study = order_ratio_study(_scale(full, 200, 1000), 12, spawn(seed, 0))
    checks.append(
        CheckResult(
            "dtv-dominance",
            study.violations == 0 and study.min_ratio >= 0.01,
            f"{study.samples} vectors, {study.violations} violations",
            {"min_ratio": study.min_ratio, "max_ratio": study.max_ratio},
        )
    )

    rng = spawn_generator(seed, 1)
    reps = _scale(full, 4000, 100_000)
    worst = 0.0
    passed = True
    for k in range(_scale(full, 3, 20)):
        lam = float(rng.uniform(0.5, 5.0))
        target = {int(a) for a in np.flatnonzero(rng.random(11) < 0.5)}
        w = int(rng.integers(1, 8))
        exact = stein_solution_recursive(target, lam, 40).values[w]
        estimate = stein_solution_probabilistic(target, lam, w, reps, seed=spawn(seed, 2, k))
        se = max(estimate.standard_error, 1e-300)
        worst = max(worst, abs(estimate.estimate - exact) / se)
        passed &= estimate.within(exact, 3.0, estimate.truncation_bound)
    checks.append(
        CheckResult("probabilistic-solution", passed, f"{reps} replications", {"worst_z": worst})
    )
    return checks


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def _metrics(seed: int, full: bool) -> list[CheckResult]:
    rng = spawn_generator(seed, 0)
    spaces = (Interval(), FiniteAtoms.discrete(4))
    pairs = _scale(full, 500, 10_000)
    worst = 0.0
    for k in range(pairs):
        space = spaces[k % 2]
        xi = random_configuration(space, rng, 6)
        eta = random_configuration(space, rng, 6)
        worst = max(
            worst,
            abs(rho1(xi, eta, space) - brute_force_rho1(xi, eta, space)),
            abs(d1_prime(xi, eta, space) - brute_force_d1_prime(xi, eta, space)),
        )
    checks = [
        CheckResult(
            "assignment-vs-brute-force", worst <= 1e-12, f"{pairs} pairs", {"max_gap": worst}
        )
    ]

    violation = 0.0
    for k in range(pairs):
        space = spaces[k % 2]
        a, b, c = (random_configuration(space, rng, 5) for _ in range(3))
        for metric in (rho1, d1_prime):
            violation = max(
                violation,
                metric(a, c, space) - metric(a, b, space) - metric(b, c, space),
                abs(metric(a, b, space) - metric(b, a, space)),
                metric(a, a, space),
            )
    checks.append(
        CheckResult(
            "metric-axioms", violation <= 1e-12, f"{pairs} triples", {"max_violation": violation}
        )
    )
    return checks


# ---------------------------------------------------------------------------
# palm
# ---------------------------------------------------------------------------


def _random_distribution(rng: np.random.Generator) -> ConfigDistribution:
    atoms = int(rng.integers(1, 5))
    draws = int(rng.integers(1, 8))
    keys = {tuple(int(c) for c in rng.integers(0, 3, size=atoms)) for _ in range(draws)}
    weights = rng.random(len(keys)) + 0.05
    weights /= weights.sum()
    probabilities = dict(zip(sorted(keys), weights, strict=True))
    return ConfigDistribution(FiniteAtoms.discrete(atoms), probabilities)


def _palm(seed: int, full: bool) -> list[CheckResult]:
    rng = spawn_generator(seed, 0)
    worst = 0.0
    cases = _scale(full, 30, 100)
    for _ in range(cases):
        dist = _random_distribution(rng)
        table = rng.random((dist.atoms, 8))

        def f(atom: int, key: tuple[int, ...], table: np.ndarray = table) -> float:
            return float(table[atom, min(sum(key), 7)])

        lhs, rhs = campbell_check(dist, f)
        worst = max(worst, abs(lhs - rhs))
    checks = [CheckResult("campbell", worst <= 1e-10, f"{cases} cases", {"max_gap": worst})]

    means = [0.4, 1.2, 0.7]
    poisson = truncated_poisson_dist(means, poisson_caps(means, 1e-12))
    gap = max(
        config_total_variation(palm(poisson, a), poisson.normalized().shift(a, 1))
        for a in range(len(means))
    )
    checks.append(
        CheckResult(
            "poisson-palm-shift",
            gap <= poisson.truncated_mass + 1e-9,
            "Palm law of Poisson equals the shifted law",
            {"tv": gap, "truncated_mass": poisson.truncated_mass},
        )
    )

    marginals = [[0.5, 0.5], [0.2, 0.3, 0.5], [0.9, 0.1]]
    product = product_distribution(FiniteAtoms.discrete(3), marginals)
    report = local_dependence_check(product, [[0], [1], [2]])
    checks.append(
        CheckResult(
            "local-dependence-product",
            report.holds,
            "",
            {"max_discrepancy": report.max_discrepancy},
        )
    )
    return checks


# ---------------------------------------------------------------------------
# imdeath
# ---------------------------------------------------------------------------


def _mean_check(name: str, values: np.ndarray, target: float) -> CheckResult:
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(len(values)))
    return CheckResult(
        name, abs(mean - target) <= 3.0 * se, f"target {target:g}", {"mean": mean, "se": se}
    )


def _imdeath(seed: int, full: bool) -> list[CheckResult]:
    checks = []
    reps = _scale(full, 2000, 20_000)
    carrier = FiniteAtoms.discrete(2)
    initial = Configuration.from_counts([5, 0])
    for k, lam in enumerate((1.0, 4.0)):
        masses = [lam / 4, 3 * lam / 4]
        field_ = DiscreteIntensity.on_atoms(carrier, masses)
        per_atom = np.zeros((reps, 2))
        row = 0
        for rng, count in replication_chunks(spawn(seed, 0, k), reps):
            for _ in range(count):
                state = simulate_spatial_imdeath(initial, field_, 30.0, rng).state_at(30.0)
                per_atom[row] = state.counts(2)
                row += 1
        totals = per_atom.sum(axis=1)
        checks.append(_mean_check(f"stationary-total lam={lam}", totals, lam))
        for atom, mass in enumerate(masses):
            checks.append(_mean_check(f"stationary-atom{atom} lam={lam}", per_atom[:, atom], mass))
        counts = np.bincount(np.minimum(totals.astype(int), 63), minlength=64)
        freq = counts / reps
        pmf = stats.poisson.pmf(np.arange(64), lam)
        tv = 0.5 * float(np.abs(freq - pmf).sum())
        se = 0.5 * float(np.sqrt(pmf * (1.0 - pmf) / reps).sum())
        checks.append(
            CheckResult(
                f"stationarity lam={lam}", tv <= 3.0 * se, f"{reps} paths", {"tv": tv, "se": se}
            )
        )

    rng = spawn_generator(seed, 1)
    atoms = 3
    carrier = FiniteAtoms.discrete(atoms)
    lam = 2.0
    field_ = DiscreteIntensity.on_atoms(carrier, [lam / atoms] * atoms)
    worst = -math.inf
    passed = True
    cases = _scale(full, 4, 50)
    for k in range(cases):
        size = (0, 1, 3, 8)[k % 4]
        xi = Configuration(tuple(int(a) for a in rng.integers(atoms, size=size)))
        anchor_size = int(rng.integers(0, 5))
        anchor = Configuration(tuple(int(a) for a in rng.integers(atoms, size=anchor_size)))
        alpha, beta = int(rng.integers(atoms)), int(rng.integers(atoms))
        estimate = estimate_second_difference(
            AnchorTestFunction(anchor, carrier),
            xi,
            alpha,
            beta,
            field_,
            reps=_scale(full, 400, 2000),
            seed=spawn(seed, 2, k),
        )
        allowance = stein_factor_bound(lam, size) + 3.0 * estimate.standard_error
        slack = abs(estimate.estimate) - allowance
        worst = max(worst, slack)
        passed &= slack <= 4.0 * math.exp(-30.0)
    checks.append(CheckResult("stein-factor", passed, f"{cases} cases", {"worst_slack": worst}))
    return checks


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------


def _models(seed: int, full: bool) -> list[CheckResult]:
    spec = MaternSpec(50.0, 0.01, 1)
    model = MaternModel(spec)
    reps = _scale(full, 2000, 20_000)
    sizes = []
    separated = True
    for rng, count in replication_chunks(spawn(seed, 0), reps):
        for _ in range(count):
            coords = model.sample(rng)
            sizes.append(len(coords))
            if len(coords) > 1 and cKDTree(coords).query_pairs(spec.radius):
                separated = False
    checks = [CheckResult("hard-core-separation", separated, f"{reps} samples")]
    mean = summarize(sizes)
    expected = matern_mean_count(spec)
    checks.append(
        CheckResult(
            "retention",
            mean.within(expected, 3.0),
            "thinned count against the void-probability intensity",
            {"estimate": mean.estimate, "se": mean.standard_error, "expected": expected},
        )
    )

    alpha = np.array([0.5])
    palm_outside, plain_outside = [], []
    for rng, count in replication_chunks(spawn(seed, 1), reps):
        for _ in range(count):
            reduced = model.sample_reduced_palm(alpha, rng)
            palm_outside.append(int(len(reduced) - model.neighbourhood_mask(alpha, reduced).sum()))
            plain = model.sample(rng)
            plain_outside.append(int(len(plain) - model.neighbourhood_mask(alpha, plain).sum()))
    first, second = summarize(palm_outside), summarize(plain_outside)
    gap = abs(first.estimate - second.estimate)
    se = math.hypot(first.standard_error, second.standard_error)
    checks.append(
        CheckResult(
            "reduced-palm-local-dependence",
            gap <= 3.0 * se,
            "counts outside B(α, 2r)",
            {"gap": gap, "se": se},
        )
    )

    study = matern_scaling_study(
        spec.mean_count,
        1,
        DEFAULT_SCALING_RADII,
        reps=_scale(full, 300, 2000),
        seed=spawn(seed, 2),
    )
    checks.append(
        CheckResult(
            "scaling-slope",
            abs(study.slope - 1.0) <= SCALING_SLOPE_TOLERANCE,
            "log bound against log r in d = 1",
            {"slope": study.slope},
        )
    )
    return checks


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def _bounds(seed: int, full: bool) -> list[CheckResult]:
    first = bound_corollary53([0.1, 0.1], [0.1, 0.1])
    single = bound_corollary53([0.1], [0.1])
    checks = [
        CheckResult(
            "renewal-closed-form",
            first.value is not None and abs(first.value - 5.0) <= 1e-9 and not single.valid,
            "n=2 worked example and n=1 invalid",
            {"value": first.value or math.nan},
        )
    ]

    rng = spawn_generator(seed, 0)
    reduction_gap, dominance = 0.0, True
    cases = _scale(full, 8, 20)
    for _ in range(cases):
        p = random_bernoulli_vector(rng, 4)
        if p.lam == 0.0:
            continue
        eq7 = bound_eq7(p)
        sharp = eq7.sharp.value or 0.0
        marks = tuple(int(m) for m in rng.integers(2, size=len(p)))
        spec = MarkedBernoulliSpec(IndependentIndicators(p.p), FiniteAtoms.discrete(2), marks)
        lifted = spec.lifted_distribution()
        hoods = lifted_neighbourhoods(lifted, [[i] for i in range(len(p))])
        theorem = bound_theorem41_exact(lifted, hoods)
        corollary = bound_corollary52(spec)
        reduction_gap = max(
            reduction_gap,
            abs((theorem.value or 0.0) - sharp),
            abs((corollary.value or 0.0) - sharp),
        )
        dist = bernoulli_process_dist(p)
        d2 = exact_d2(dist, poisson_reference(dist, 1e-12))
        dominance &= d2.lower <= sharp + 1e-12
        if eq7.crude.valid and eq7.crude.value is not None:
            dominance &= sharp <= eq7.crude.value + 1e-12
    checks.append(
        CheckResult(
            "independent-reduction",
            reduction_gap <= 1e-10,
            f"{cases} vectors",
            {"max_gap": reduction_gap},
        )
    )
    checks.append(CheckResult("bernoulli-dominance", dominance, "exact d2 <= sharp <= crude"))

    laws = [
        discrete_renewal_dist([0.3, 0.2], [0.2, 0.3], 6),
        discrete_renewal_dist([0.1, 0.4], [0.5], 6),
    ]
    lifted = lift_independent(laws)
    theorem = bound_theorem51_exact(lifted, [[0], [1]])
    superposition = project_labels(lifted, laws[0].carrier)
    d2 = exact_d2(superposition, poisson_reference(superposition, 1e-12))
    checks.append(
        CheckResult(
            "renewal-dominance",
            theorem.value is not None and d2.lower <= theorem.value,
            "two discrete renewal components on 6 slots",
            {"bound": theorem.value or math.nan, "d2": d2.value},
        )
    )
    return checks


RUNNERS: dict[str, Callable[[int, bool], list[CheckResult]]] = {
    "univariate": _univariate,
    "metrics": _metrics,
    "palm": _palm,
    "imdeath": _imdeath,
    "models": _models,
    "bounds": _bounds,
}


def run_suite(name: str, seed: int = 0, full: bool = False) -> list[SuiteReport]:
    """Run one suite, or every suite for ``name == "all"``.

    Raises:
        DomainError: For an unknown suite name.
    """
    if name == "all":
        names = list(SUITES)
    elif name in RUNNERS:
        names = [name]
    else:
        raise DomainError(f"unknown suite {name!r}; choose from {', '.join((*SUITES, 'all'))}")
    reports = []
    for suite in names:
        logger.info("running suite %s", suite)
        reports.append(SuiteReport(suite, tuple(RUNNERS[suite](seed, full))))
    return reports


def suite_names() -> tuple[str, ...]:
    return (*SUITES, "all")

