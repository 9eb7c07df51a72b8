"""Named batch experiments behind ``stein-poisson experiment``.

An experiment turns an :class:`~stein_poisson.config.ExperimentConfig` into
rows for one CSV table plus metadata for the JSON sidecar. Nothing here reads
a clock or an entropy source, so the same config and seed always produce
byte-identical files.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import ot
import scipy

from ._version import __version__
from .bounds import (
    DEFAULT_SCALING_RADII,
    IndependentIndicatorCoupling,
    bound_corollary53,
    bound_eq7,
    bound_theorem51_exact,
    bound_theorem51_mc,
    matern_scaling_study,
)
from .carrier import Configuration, FiniteAtoms, rho1
from .config import ExperimentConfig
from .errors import ConfigurationError, DomainError, SteinPoissonError
from .imdeath import (
    AnchorTestFunction,
    DiscreteIntensity,
    estimate_second_difference,
    stein_factor_bound,
)
from .io import report_row, write_json, write_table_csv
from .logging import get_logger, log_fields
from .models import SlotLaw
from .palmexact import (
    bernoulli_process_dist,
    campbell_check,
    config_total_variation,
    discrete_renewal_dist,
    exact_d2,
    intensity,
    lift_independent,
    local_dependence_check,
    palm,
    poisson_caps,
    poisson_reference,
    project_labels,
    truncated_poisson_dist,
)
from .rng import spawn, spawn_generator
from .univariate import BernoulliVector, exact_dtv_poisson_binomial

logger = get_logger(__name__)

MAX_EXACT_BERNOULLI = 4
MAX_EXACT_RENEWAL_SLOTS = 8


@dataclass
class ExperimentResult:
    """Rows of the output table and the sidecar metadata."""

    rows: list[dict[str, Any]]
    metadata: dict[str, Any] = field(default_factory=dict)
    tail_masses: list[float] = field(default_factory=list)


def _param(config: ExperimentConfig, key: str, default: Any) -> Any:
    return config.parameters.get(key, default)


def _is_number(value: Any) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


def _float_list(value: Any, path: str) -> list[float]:
    if not isinstance(value, list) or not all(_is_number(v) for v in value):
        raise ConfigurationError(path, "must be a list of numbers")
    return [float(v) for v in value]


def _float_value(value: Any, path: str) -> float:
    if not _is_number(value) or not math.isfinite(value):
        raise ConfigurationError(path, f"must be a finite number, got {value!r}")
    return float(value)


def _int_value(value: Any, path: str, minimum: int = 0) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigurationError(path, f"must be an integer >= {minimum}, got {value!r}")
    return value


def _int_list(value: Any, path: str, minimum: int = 0) -> list[int]:
    if not isinstance(value, list):
        raise ConfigurationError(path, "must be a list of integers")
    return [_int_value(v, f"{path}[{k}]", minimum) for k, v in enumerate(value)]


def _float_param(config: ExperimentConfig, key: str, default: float) -> float:
    return _float_value(_param(config, key, default), f"parameters.{key}")


def _int_param(config: ExperimentConfig, key: str, default: int, minimum: int = 0) -> int:
    return _int_value(_param(config, key, default), f"parameters.{key}", minimum)


# ---------------------------------------------------------------------------
# bernoulli-bound
# ---------------------------------------------------------------------------


def run_bernoulli_bound(config: ExperimentConfig) -> ExperimentResult:
    """Sharp and crude independent-indicator bounds, with exact d₂ for short vectors."""
    vectors = _param(config, "p", [[0.1, 0.1], [0.01] * 100])
    if not isinstance(vectors, list) or not vectors:
        raise ConfigurationError("parameters.p", "must be a non-empty list of probability vectors")
    tail = _float_param(config, "tail", 1e-10)
    rows, tails = [], []
    for k, raw in enumerate(vectors):
        path = f"parameters.p[{k}]"
        try:
            p = BernoulliVector(tuple(_float_list(raw, path)))
        except DomainError as exc:
            raise ConfigurationError(path, str(exc)) from exc
        bounds = bound_eq7(p)
        row: dict[str, Any] = {
            "case": k,
            "n": len(p),
            "lam": p.lam,
            "sum_p_squared": p.sum_squares,
            "sharp": bounds.sharp.value,
            "crude": "" if bounds.crude.value is None else bounds.crude.value,
            "crude_valid": bounds.crude.valid,
            "dtv_exact": exact_dtv_poisson_binomial(p),
        }
        if config.mode == "exact" and len(p) <= MAX_EXACT_BERNOULLI and p.lam > 0.0:
            dist = bernoulli_process_dist(p)
            d2 = exact_d2(dist, poisson_reference(dist, tail))
            row.update(d2_lower=d2.lower, d2_upper=d2.upper)
            tails.append(d2.truncation)
        elif config.mode == "mc" and p.lam > 0.0:
            estimate = bound_theorem51_mc(
                IndependentIndicatorCoupling(p),
                config.monte_carlo.reps,
                spawn(config.monte_carlo.seed, k),
            )
            row.update(sharp_mc=estimate.value, sharp_mc_se=estimate.standard_error)
        rows.append(row)
    return ExperimentResult(rows, tail_masses=tails)


# ---------------------------------------------------------------------------
# matern-scaling
# ---------------------------------------------------------------------------


def run_matern_scaling(config: ExperimentConfig) -> ExperimentResult:
    """Monte Carlo locally dependent bound over a grid of hard-core radii."""
    if config.mode != "mc":
        raise ConfigurationError("mode", "matern-scaling runs in Monte Carlo mode only")
    nu = _float_param(config, "nu", 50.0)
    dimension = _int_param(config, "dimension", 1, minimum=1)
    radii = _float_list(_param(config, "radii", list(DEFAULT_SCALING_RADII)), "parameters.radii")
    try:
        study = matern_scaling_study(
            nu, dimension, radii, config.monte_carlo.reps, config.monte_carlo.seed
        )
    except DomainError as exc:
        raise ConfigurationError("parameters", str(exc)) from exc
    rows = [
        report_row(report, {"radius": r, "nu": nu, "dimension": dimension, "slope": study.slope})
        for r, report in zip(study.radii, study.reports, strict=True)
    ]
    return ExperimentResult(rows, {"slope": study.slope, "intercept": study.intercept})


# ---------------------------------------------------------------------------
# renewal-bound
# ---------------------------------------------------------------------------


def _renewal_grid_rows(grid: dict[str, Any]) -> list[dict[str, Any]]:
    counts = _int_list(grid.get("n", [1, 2, 50]), "parameters.grid.n", minimum=1)
    g_values = _float_list(grid.get("G", [0.02, 0.1]), "parameters.grid.G")
    f_values = _float_list(grid.get("F", [0.02, 0.1]), "parameters.grid.F")
    rows = []
    for n, g, f in itertools.product(counts, g_values, f_values):
        try:
            report = bound_corollary53([g] * n, [f] * n)
        except DomainError as exc:
            raise ConfigurationError("parameters.grid", str(exc)) from exc
        rows.append(report_row(report, {"n": n, "G": g, "F": f}))
    return rows


def _renewal_exact_rows(spec: dict[str, Any]) -> tuple[list[dict[str, Any]], list[float]]:
    slots = _int_value(spec.get("slots", 6), "parameters.discrete.slots", minimum=1)
    if slots > MAX_EXACT_RENEWAL_SLOTS:
        raise ConfigurationError(
            "parameters.discrete.slots", f"must lie in [1, {MAX_EXACT_RENEWAL_SLOTS}]"
        )
    components = spec.get("components", [{"first": [0.3, 0.2], "gap": [0.2, 0.3]}] * 2)
    if not isinstance(components, list) or not components:
        raise ConfigurationError("parameters.discrete.components", "must be a non-empty list")
    laws, firsts, gaps = [], [], []
    for k, component in enumerate(components):
        path = f"parameters.discrete.components[{k}]"
        if not isinstance(component, dict):
            raise ConfigurationError(path, "must be an object with first and gap")
        first = _float_list(component.get("first"), f"{path}.first")
        gap = _float_list(component.get("gap"), f"{path}.gap")
        try:
            laws.append(discrete_renewal_dist(first, gap, slots))
        except DomainError as exc:
            raise ConfigurationError(path, str(exc)) from exc
        firsts.append(SlotLaw(tuple(first)).cdf(slots))
        gaps.append(SlotLaw(tuple(gap)).cdf(slots))

    lifted = lift_independent(laws)
    theorem = bound_theorem51_exact(lifted, [[i] for i in range(len(laws))])
    superposition = project_labels(lifted, laws[0].carrier)
    rows = [report_row(theorem, {"slots": slots, "components": len(laws)})]
    tails = []
    if theorem.valid:
        d2 = exact_d2(superposition, poisson_reference(superposition))
        rows[0].update(d2_lower=d2.lower, d2_upper=d2.upper)
        tails.append(d2.truncation)
    closed_form = bound_corollary53(firsts, gaps)
    rows.append(report_row(closed_form, {"slots": slots, "components": len(laws)}))
    return rows, tails


def run_renewal_bound(config: ExperimentConfig) -> ExperimentResult:
    """Closed-form superposition bound over a (n, G, F) grid, plus an exact check."""
    grid = _param(config, "grid", {})
    if not isinstance(grid, dict):
        raise ConfigurationError("parameters.grid", "must be an object")
    rows = _renewal_grid_rows(grid)
    tails: list[float] = []
    discrete = _param(config, "discrete", None)
    if config.mode == "exact" and discrete is not None:
        if not isinstance(discrete, dict):
            raise ConfigurationError("parameters.discrete", "must be an object")
        exact_rows, tails = _renewal_exact_rows(discrete)
        rows.extend(exact_rows)
    return ExperimentResult(rows, tail_masses=tails)


# ---------------------------------------------------------------------------
# stein-factor
# ---------------------------------------------------------------------------


def run_stein_factor(config: ExperimentConfig) -> ExperimentResult:
    """Sampled second differences of g_h against 3.5/λ + 2.5/(|ξ| + 1)."""
    lam = _float_param(config, "lam", 2.0)
    atoms = _int_param(config, "atoms", 3, minimum=1)
    sizes = _int_list(_param(config, "sizes", [0, 1, 3, 8]), "parameters.sizes")
    samples = _int_param(config, "samples", 5)
    if lam <= 0.0:
        raise ConfigurationError("parameters.lam", "must be positive")
    carrier = FiniteAtoms.discrete(atoms)
    field_ = DiscreteIntensity.on_atoms(carrier, [lam / atoms] * atoms)
    seed = config.monte_carlo.seed
    t_star = config.monte_carlo.t_star
    rows = []
    for case, (size, k) in enumerate(itertools.product(sizes, range(samples))):
        rng = spawn_generator(seed, 0, case)
        xi = Configuration(tuple(int(a) for a in rng.integers(atoms, size=size)))
        anchor_size = int(rng.integers(0, 6))
        anchor = Configuration(tuple(int(a) for a in rng.integers(atoms, size=anchor_size)))
        alpha, beta = int(rng.integers(atoms)), int(rng.integers(atoms))
        estimate = estimate_second_difference(
            AnchorTestFunction(anchor, carrier),
            xi,
            alpha,
            beta,
            field_,
            reps=config.monte_carlo.reps,
            seed=spawn(seed, 1, case),
            t_star=t_star,
        )
        bound = stein_factor_bound(lam, size)
        rows.append(
            {
                "case": case,
                "sample": k,
                "size": size,
                "alpha": alpha,
                "beta": beta,
                "anchor_distance": rho1(xi, anchor, carrier),
                "estimate": estimate.estimate,
                "se": estimate.standard_error,
                "bound": bound,
                "within": abs(estimate.estimate)
                <= bound + 3.0 * estimate.standard_error + estimate.truncation_bound,
            }
        )
    return ExperimentResult(rows, tail_masses=[math.exp(-2.0 * t_star)])


# ---------------------------------------------------------------------------
# palm-exact
# ---------------------------------------------------------------------------


def run_palm_exact(config: ExperimentConfig) -> ExperimentResult:
    """Campbell identity, Poisson Palm shift and local dependence on a truncated Poisson law."""
    means = _float_list(_param(config, "means", [0.5, 1.0, 0.3]), "parameters.means")
    tail = _float_param(config, "tail", 1e-12)
    try:
        dist = truncated_poisson_dist(means, poisson_caps(means, tail))
    except DomainError as exc:
        raise ConfigurationError("parameters.means", str(exc)) from exc
    lam = intensity(dist)
    independent = local_dependence_check(dist, [[a] for a in range(dist.atoms)])

    def total_count(atom: int, xi: tuple[int, ...]) -> float:
        return float(sum(xi))

    lhs, rhs = campbell_check(dist, total_count)
    rows = []
    for a in range(dist.atoms):
        if lam[a] == 0.0:
            continue
        shifted = dist.normalized().shift(a, 1)
        rows.append(
            {
                "atom": a,
                "mean": means[a],
                "intensity": float(lam[a]),
                "palm_shift_tv": config_total_variation(palm(dist, a), shifted),
                "campbell_lhs": lhs,
                "campbell_rhs": rhs,
                "local_dependence": independent.holds,
                "truncated_mass": dist.truncated_mass,
            }
        )
    return ExperimentResult(rows, tail_masses=[dist.truncated_mass])


RUNNERS: dict[str, Callable[[ExperimentConfig], ExperimentResult]] = {
    "bernoulli-bound": run_bernoulli_bound,
    "matern-scaling": run_matern_scaling,
    "renewal-bound": run_renewal_bound,
    "stein-factor": run_stein_factor,
    "palm-exact": run_palm_exact,
}


def versions() -> dict[str, str]:
    return {
        "stein_poisson": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pot": ot.__version__,
    }


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run the experiment named in ``config`` and fill in the sidecar metadata."""
    runner = RUNNERS[config.name]
    logger.info(
        "running experiment %s",
        config.name,
        extra=log_fields(mode=config.mode, reps=config.monte_carlo.reps),
    )
    try:
        result = runner(config)
    except ConfigurationError:
        raise
    except SteinPoissonError as exc:
        logger.error("experiment %s failed: %s", config.name, exc)
        raise
    result.metadata = {
        **result.metadata,
        **config.canonical(),
        "config_hash": config.config_hash(),
        "seed": config.monte_carlo.seed,
        "versions": versions(),
        "tail_masses": result.tail_masses,
        "rows": len(result.rows),
    }
    return result


def write_experiment(config: ExperimentConfig, result: ExperimentResult) -> tuple[Path, Path]:
    """Write the CSV table and its JSON sidecar; returns both paths."""
    config.output.directory.mkdir(parents=True, exist_ok=True)
    header = {"config_hash": config.config_hash(), "seed": config.monte_carlo.seed}
    table = write_table_csv(result.rows, config.output.table_path(config.name), header)
    sidecar = write_json(result.metadata, config.output.sidecar_path(config.name))
    return table, sidecar


def experiment_names() -> Sequence[str]:
    return tuple(RUNNERS)
