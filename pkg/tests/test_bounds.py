"""Tests for the Poisson process approximation bounds."""

import json
import math

import pytest

from stein_poisson.bounds import (
    DEFAULT_SCALING_RADII,
    BoundReport,
    IndependentIndicatorCoupling,
    bound_corollary52,
    bound_corollary53,
    bound_eq7,
    bound_theorem41,
    bound_theorem41_exact,
    bound_theorem41_mc,
    bound_theorem51,
    bound_theorem51_exact,
    bound_theorem51_mc,
    corollary53_from_components,
    lifted_neighbourhoods,
    matern_scaling_study,
)
from stein_poisson.carrier import FiniteAtoms, Interval
from stein_poisson.errors import ConfigurationError, DomainError
from stein_poisson.models import (
    IndependentIndicators,
    MarkedBernoulliSpec,
    MaternModel,
    MaternSpec,
    MovingWindowIndicators,
    RenewalComponent,
    SlotLaw,
)
from stein_poisson.palmexact import (
    ConfigDistribution,
    bernoulli_process_dist,
    indicator_table_dist,
    lift_independent,
)
from stein_poisson.univariate import BernoulliVector

P = BernoulliVector((0.2, 0.3, 0.4))


def _lifted_bernoulli(p: BernoulliVector) -> ConfigDistribution:
    return lift_independent([bernoulli_process_dist(BernoulliVector((q,))) for q in p.p])


class TestBoundReport:
    """Tests for the report record."""

    def test_exact_report_interval(self) -> None:
        """Exact reports have a degenerate interval and no standard error."""
        report = BoundReport.exact("x", 0.5, {"first": 0.5})
        assert report.lower == report.upper == report.value == 0.5
        assert report.standard_error == 0.0
        assert report.valid

    def test_invalid_report(self) -> None:
        """Invalid reports carry a reason and no value."""
        report = BoundReport.invalid("x", "denominator is zero")
        assert report.value is None
        assert not report.valid
        assert report.reason == "denominator is zero"

    def test_json(self) -> None:
        """Reports serialise to sorted JSON."""
        report = BoundReport.exact("x", 1.0, {"a": 1.0}, notes=("n",))
        data = json.loads(report.to_json())
        assert data["name"] == "x"
        assert data["notes"] == ["n"]
        assert data["terms"] == {"a": 1.0}


class TestIndependentIndicators:
    """Tests for the Bernoulli-process bound."""

    def test_crude_form(self) -> None:
        """crude = 6 Σ p_i² / (λ − max p_i)."""
        bounds = bound_eq7(BernoulliVector((0.1, 0.1)))
        assert bounds.crude.value == pytest.approx(1.2)

    def test_crude_form_invalid_for_single_indicator(self) -> None:
        """λ = max p_i makes the denominator vanish."""
        bounds = bound_eq7(BernoulliVector((0.5,)))
        assert not bounds.crude.valid
        assert bounds.sharp.value == pytest.approx(0.25 * (3.5 / 0.5 + 2.5))

    def test_zero_intensity(self) -> None:
        """All p_i = 0 gives a zero sharp bound."""
        bounds = bound_eq7(BernoulliVector((0.0, 0.0)))
        assert bounds.sharp.value == 0.0
        assert not bounds.crude.valid

    def test_sharp_below_crude(self) -> None:
        """The sharp form never exceeds the crude one."""
        bounds = bound_eq7(P)
        assert bounds.sharp.value is not None
        assert bounds.crude.value is not None
        assert bounds.sharp.value <= bounds.crude.value


class TestLocallyDependent:
    """Tests for the locally dependent bound."""

    def test_reduces_to_independent_bound(self) -> None:
        """With A_a = {a} on a Bernoulli process the bound is the sharp independent one."""
        dist = bernoulli_process_dist(P)
        report = bound_theorem41_exact(dist, [{a} for a in range(3)])
        assert report.terms["first"] == pytest.approx(0.0)
        assert report.value == pytest.approx(bound_eq7(P).sharp.value)

    def test_dependent_pair(self) -> None:
        """Two indicators that are always equal."""
        dist = indicator_table_dist(FiniteAtoms.discrete(2), {(0, 0): 0.5, (1, 1): 0.5})
        report = bound_theorem41_exact(dist, [{0, 1}, {0, 1}])
        assert report.terms["first"] == pytest.approx(6.0)
        assert report.terms["second"] == pytest.approx(6.0)
        assert report.value == pytest.approx(12.0)

    def test_local_dependence_failure_is_reported(self) -> None:
        """Neighbourhoods that miss the dependence make the bound invalid."""
        dist = indicator_table_dist(FiniteAtoms.discrete(2), {(0, 0): 0.5, (1, 1): 0.5})
        report = bound_theorem41_exact(dist, [{0}, {1}])
        assert not report.valid
        assert "local dependence" in report.reason

    def test_zero_intensity(self) -> None:
        """An empty process has no bound."""
        dist = ConfigDistribution.point_mass(FiniteAtoms.discrete(2), (0, 0))
        assert not bound_theorem41_exact(dist, [{0}, {1}]).valid

    def test_dispatch_needs_arguments(self) -> None:
        """Exact mode needs neighbourhoods and Monte Carlo mode needs a seed."""
        with pytest.raises(ConfigurationError):
            bound_theorem41(bernoulli_process_dist(P))
        with pytest.raises(ConfigurationError):
            bound_theorem41(MaternModel(MaternSpec(10.0, 0.01, 1)), reps=10)

    def test_monte_carlo_on_matern(self) -> None:
        """The estimate is positive, reproducible and carries its interval."""
        model = MaternModel(MaternSpec(20.0, 0.005, 1))
        report = bound_theorem41_mc(model, 200, seed=0)
        again = bound_theorem41(model, reps=200, seed=0)
        assert report.mode == "monte-carlo"
        assert report.value is not None
        assert report.value > 0.0
        assert report.lower is not None and report.upper is not None
        assert report.lower <= report.value <= report.upper
        assert set(report.standard_errors) == {"first", "second", "neighbourhood_mass"}
        assert again.value == report.value


class TestMarkedBernoulli:
    """Tests for the marked Bernoulli bound."""

    def test_independent_case_is_sharp_bound(self) -> None:
        """Independent indicators reproduce the sharp independent bound."""
        spec = MarkedBernoulliSpec(IndependentIndicators(P.p), Interval())
        report = bound_corollary52(spec)
        assert report.value == pytest.approx(bound_eq7(P).sharp.value)

    def test_monte_carlo_agrees_with_exact(self) -> None:
        """Both modes agree for m-dependent indicators."""
        spec = MarkedBernoulliSpec(MovingWindowIndicators(6, 1, 0.5), Interval())
        exact = bound_corollary52(spec)
        estimate = bound_corollary52(spec, "monte-carlo", reps=3000, seed=4)
        assert exact.value is not None and estimate.value is not None
        assert abs(estimate.value - exact.value) <= 4.0 * estimate.standard_error + 1e-9

    def test_null_conditioning_event(self) -> None:
        """An indicator with p_j = 0 is noted, not fatal."""
        spec = MarkedBernoulliSpec(IndependentIndicators((0.0, 0.5)), Interval())
        report = bound_corollary52(spec)
        assert report.valid
        assert any("p_0 = 0" in note for note in report.notes)

    def test_zero_intensity(self) -> None:
        """All indicators off gives an invalid bound."""
        spec = MarkedBernoulliSpec(IndependentIndicators((0.0, 0.0)), Interval())
        assert not bound_corollary52(spec).valid

    def test_mode_validation(self) -> None:
        """Unknown modes and seedless Monte Carlo runs are configuration errors."""
        spec = MarkedBernoulliSpec(IndependentIndicators((0.5, 0.5)), Interval())
        with pytest.raises(ConfigurationError):
            bound_corollary52(spec, "approximate")  # type: ignore[arg-type]
        with pytest.raises(ConfigurationError):
            bound_corollary52(spec, "monte-carlo")


class TestSuperposition:
    """Tests for the superposition bound."""

    def test_lifted_neighbourhoods(self) -> None:
        """Label neighbourhoods expand to whole label blocks."""
        dist = lift_independent([bernoulli_process_dist(BernoulliVector((0.5, 0.5)))] * 2)
        hoods = lifted_neighbourhoods(dist, [{0}, {1}])
        assert hoods == [{0, 1}, {0, 1}, {2, 3}, {2, 3}]
        with pytest.raises(DomainError):
            lifted_neighbourhoods(bernoulli_process_dist(P), [{0}])

    def test_exact_independent_components(self) -> None:
        """Independent Bernoulli components reproduce the sharp independent bound."""
        report = bound_theorem51_exact(_lifted_bernoulli(P), [{0}, {1}, {2}])
        assert report.terms["first"] == pytest.approx(0.0, abs=1e-12)
        assert report.value == pytest.approx(bound_eq7(P).sharp.value)
        assert report.coupling is not None

    def test_exact_validation(self) -> None:
        """Neighbourhoods must match the components and contain their own label."""
        dist = _lifted_bernoulli(P)
        with pytest.raises(DomainError):
            bound_theorem51_exact(dist, [{0}, {1}])
        with pytest.raises(DomainError):
            bound_theorem51_exact(dist, [{1}, {1}, {2}])
        with pytest.raises(DomainError):
            bound_theorem51_exact(bernoulli_process_dist(P), [{0}, {1}, {2}])

    def test_monte_carlo_reference_coupling(self) -> None:
        """The reference coupling estimate agrees with the exact value."""
        estimate = bound_theorem51_mc(IndependentIndicatorCoupling(P), 4000, seed=6)
        expected = bound_eq7(P).sharp.value
        assert estimate.value is not None and expected is not None
        assert estimate.terms["first"] == 0.0
        assert abs(estimate.value - expected) <= 4.0 * estimate.standard_error
        assert estimate.coupling == "independent-indicators"

    def test_monte_carlo_needs_coupling(self) -> None:
        """A coupling is mandatory in Monte Carlo mode."""
        with pytest.raises(ConfigurationError):
            bound_theorem51(None, seed=0)
        with pytest.raises(ConfigurationError):
            bound_theorem51(_lifted_bernoulli(P))


class TestRenewal:
    """Tests for the renewal superposition bound."""

    def test_closed_form(self) -> None:
        """Two components with G = F = 0.1."""
        report = bound_corollary53([0.1, 0.1], [0.1, 0.1])
        assert report.value == pytest.approx(5.0)
        assert report.terms["denominator"] == pytest.approx(0.2 - 0.1 / 0.9)

    def test_sparse_components(self) -> None:
        """Fifty components with G = F = 0.02."""
        report = bound_corollary53([0.02] * 50, [0.02] * 50)
        expected = (6.0 * 50 * 0.06 * 0.02 / 0.98**2) / (1.0 - 0.02 / 0.98)
        assert report.value == pytest.approx(expected)
        assert report.value == pytest.approx(0.383, abs=5e-4)

    def test_single_component_is_invalid(self) -> None:
        """Σ G_i − max G_j/(1 − F_j) is negative for one component."""
        report = bound_corollary53([0.3], [0.2])
        assert not report.valid
        assert report.terms["denominator"] < 0.0

    def test_certain_gap_is_invalid(self) -> None:
        """F_i(T) = 1 leaves no bound."""
        assert not bound_corollary53([0.1, 0.1], [1.0, 0.1]).valid

    @pytest.mark.parametrize(("g", "f"), [([0.1], [0.1, 0.2]), ([], []), ([1.2], [0.1])])
    def test_argument_validation(self, g: list[float], f: list[float]) -> None:
        """Lengths must match and values must be probabilities."""
        with pytest.raises(DomainError):
            bound_corollary53(g, f)

    def test_from_components(self) -> None:
        """The cdfs are read off the laws at the horizon."""
        component = RenewalComponent(SlotLaw((0.1,)), SlotLaw((0.1,)))
        report = corollary53_from_components([component, component], 5.0)
        assert report.value == pytest.approx(5.0)

    def test_grows_with_gap_mass(self) -> None:
        """Holding G fixed, a heavier gap cdf raises the bound."""
        low = bound_corollary53([0.05] * 10, [0.01] * 10)
        high = bound_corollary53([0.05] * 10, [0.05] * 10)
        assert low.value is not None and high.value is not None
        assert low.value < high.value


class TestScalingStudy:
    """Tests for the Matérn order study."""

    def test_radius_validation(self) -> None:
        """At least two radii, each small enough for B(α, 2r)."""
        with pytest.raises(DomainError):
            matern_scaling_study(radii=(0.001,), reps=10)
        with pytest.raises(DomainError):
            matern_scaling_study(radii=(0.001, 0.3), reps=10)

    def test_small_study(self) -> None:
        """A short run yields one report per radius and a finite slope."""
        study = matern_scaling_study(20.0, 1, (0.002, 0.004), reps=50, seed=1)
        assert len(study.reports) == 2
        assert all(report.valid for report in study.reports)
        assert math.isfinite(study.slope)

    @pytest.mark.slow
    def test_default_radii_slope_in_one_dimension(self) -> None:
        """In d = 1 the bound grows linearly in r over the default radii."""
        study = matern_scaling_study(nu=50.0, dimension=1, radii=DEFAULT_SCALING_RADII, reps=2000)
        assert abs(study.slope - 1.0) <= 0.2
