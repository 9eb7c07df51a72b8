"""Tests for the spatial immigration-death process and its coupled estimators."""

import math

import numpy as np
import pytest

from stein_poisson.carrier import Configuration, FiniteAtoms
from stein_poisson.errors import DomainError
from stein_poisson.imdeath import (
    AnchorTestFunction,
    ConstantTestFunction,
    DensityIntensity,
    DiscreteIntensity,
    Event,
    Trajectory,
    coupled_trace,
    estimate_gh_difference,
    estimate_poisson_expectation,
    estimate_second_difference,
    sample_imdeath_state,
    sample_poisson_process,
    simulate_spatial_imdeath,
    stein_equation_residual,
    stein_factor_bound,
)
from stein_poisson.univariate import simulate_count_imdeath


@pytest.fixture
def carrier() -> FiniteAtoms:
    """Three atoms at mutual distance 1."""
    return FiniteAtoms.discrete(3)


@pytest.fixture
def uniform_field(carrier: FiniteAtoms) -> DiscreteIntensity:
    """Total immigration rate 1.5 spread evenly over three atoms."""
    return DiscreteIntensity.on_atoms(carrier, [0.5, 0.5, 0.5])


class TestIntensities:
    """Tests for intensity measures."""

    def test_discrete_validation(self, carrier: FiniteAtoms) -> None:
        """Masses must match atoms and be finite and nonnegative."""
        with pytest.raises(DomainError):
            DiscreteIntensity.on_atoms(carrier, [1.0, 1.0])
        with pytest.raises(DomainError):
            DiscreteIntensity.on_atoms(carrier, [1.0, -1.0, 0.0])

    def test_discrete_sampling_respects_masses(self, carrier: FiniteAtoms) -> None:
        """Atoms without mass are never drawn."""
        field = DiscreteIntensity.on_atoms(carrier, [0.0, 2.0, 0.0])
        rng = np.random.default_rng(0)
        assert {field.sample_location(rng) for _ in range(20)} == {1}

    def test_density_needs_finite_supremum(self) -> None:
        """An infinite envelope is a domain error."""
        with pytest.raises(DomainError):
            DensityIntensity(1, lambda _x: 1.0, math.inf, 1.0)

    def test_density_above_supremum_detected(self) -> None:
        """Rejection sampling notices a density that breaks its envelope."""
        field = DensityIntensity(1, lambda _x: 2.0, 1.0, 2.0)
        with pytest.raises(DomainError):
            field.sample_location(np.random.default_rng(0))

    def test_density_sampling_and_validation(self) -> None:
        """Samples land in the cube and the mass estimate matches the declaration."""
        field = DensityIntensity(2, lambda u: 2.0 * float(u[0]), 2.0, 1.0)
        rng = np.random.default_rng(1)
        points = [field.sample_location(rng) for _ in range(200)]
        assert all(0.0 <= x <= 1.0 and 0.0 <= y <= 1.0 for x, y in points)
        assert np.mean([x for x, _ in points]) > 0.55
        assert field.validate(4000, seed=2).within(1.0, n_se=4.0)

    def test_poisson_process_count(self) -> None:
        """Po(λ) samples have mean count λ."""
        field = DensityIntensity.uniform(1, 3.0)
        counts = [len(sample_poisson_process(field, seed)) for seed in range(1000)]
        se = math.sqrt(3.0 / len(counts))
        assert abs(np.mean(counts) - 3.0) <= 5.0 * se
        assert len(sample_poisson_process(DensityIntensity.uniform(1, 0.0), 0)) == 0


class TestTrajectory:
    """Tests for simulated paths."""

    def test_event_times_must_increase(self) -> None:
        """Out-of-order events are rejected."""
        events = (Event(0.5, "birth", 0), Event(0.2, "birth", 1))
        with pytest.raises(DomainError):
            Trajectory(Configuration(), events, 1.0)

    def test_replay(self) -> None:
        """States and segments follow the event log."""
        path = Trajectory(
            Configuration((2,)),
            (Event(0.5, "birth", 0), Event(0.8, "death", 2, 0)),
            1.0,
        )
        assert path.state_at(0.6) == Configuration((0, 2))
        assert path.final == Configuration((0,))
        assert path.counts() == (1, 2, 1)
        assert [(a, b) for a, b, _ in path.segments()] == [(0.0, 0.5), (0.5, 0.8), (0.8, 1.0)]

    def test_death_must_reference_live_point(self) -> None:
        """Replaying a death without a victim fails."""
        path = Trajectory(Configuration(), (Event(0.1, "death", 0, 0),), 1.0)
        with pytest.raises(DomainError):
            path.state_at(1.0)

    def test_simulation_is_reproducible(self, uniform_field: DiscreteIntensity) -> None:
        """The same seed gives the same path."""
        start = Configuration((0, 1))
        first = simulate_spatial_imdeath(start, uniform_field, 4.0, seed=9)
        second = simulate_spatial_imdeath(start, uniform_field, 4.0, seed=9)
        assert first == second

    def test_count_path_matches_count_chain(self, uniform_field: DiscreteIntensity) -> None:
        """Counts of the spatial path coincide with the count chain for the same seed."""
        spatial = simulate_spatial_imdeath(Configuration((0, 1, 2)), uniform_field, 5.0, seed=4)
        counts = simulate_count_imdeath(3, 1.5, 5.0, seed=4)
        assert [e.time for e in spatial.events] == list(counts.times)
        assert len(spatial.final) == counts.final

    def test_negative_horizon(self, uniform_field: DiscreteIntensity) -> None:
        """The horizon must be nonnegative."""
        with pytest.raises(DomainError):
            simulate_spatial_imdeath(Configuration(), uniform_field, -1.0, seed=0)

    def test_direct_state_sampler_mean(self, uniform_field: DiscreteIntensity) -> None:
        """E|Z_ξ(t)| = |ξ| e^{−t} + λ(1 − e^{−t})."""
        start = Configuration((0, 0, 1, 2))
        t = 0.8
        sizes = [len(sample_imdeath_state(start, uniform_field, t, seed)) for seed in range(2000)]
        expected = 4 * math.exp(-t) + 1.5 * (1.0 - math.exp(-t))
        se = float(np.std(sizes, ddof=1) / math.sqrt(len(sizes)))
        assert abs(float(np.mean(sizes)) - expected) <= 5.0 * se

    def test_simulated_path_forgets_its_start(self, carrier: FiniteAtoms) -> None:
        """Z(30) from a crowded atom has Poisson means per atom and in total."""
        masses = [0.2, 0.3, 1.0]
        field_ = DiscreteIntensity.on_atoms(carrier, masses)
        start = Configuration.from_counts([6, 0, 0])
        per_atom = np.array(
            [
                simulate_spatial_imdeath(start, field_, 30.0, seed).state_at(30.0).counts(3)
                for seed in range(800)
            ]
        )
        se = per_atom.std(axis=0, ddof=1) / math.sqrt(len(per_atom))
        assert np.all(np.abs(per_atom.mean(axis=0) - masses) <= 5.0 * se)
        totals = per_atom.sum(axis=1)
        total_se = float(totals.std(ddof=1) / math.sqrt(len(totals)))
        assert abs(float(totals.mean()) - 1.5) <= 5.0 * total_se


class TestEstimators:
    """Tests for the coupled Stein-solution estimators."""

    def test_constant_function_has_no_differences(
        self, uniform_field: DiscreteIntensity
    ) -> None:
        """Differences of g_h vanish for constant h."""
        h = ConstantTestFunction(0.3)
        xi = Configuration((0,))
        assert estimate_gh_difference(h, xi, 1, uniform_field, reps=5, seed=0).estimate == 0.0
        second = estimate_second_difference(h, xi, 1, 2, uniform_field, reps=5, seed=0)
        assert second.estimate == 0.0
        assert estimate_poisson_expectation(h, uniform_field, reps=5, seed=0).estimate == 0.3

    def test_t_star_must_be_positive(
        self, carrier: FiniteAtoms, uniform_field: DiscreteIntensity
    ) -> None:
        """A zero truncation horizon is rejected."""
        h = AnchorTestFunction(Configuration(), carrier)
        with pytest.raises(DomainError):
            estimate_gh_difference(h, Configuration(), 0, uniform_field, reps=5, seed=0, t_star=0)

    def test_first_difference_is_lipschitz(
        self, carrier: FiniteAtoms, uniform_field: DiscreteIntensity
    ) -> None:
        """|g_h(ξ + δ_x) − g_h(ξ)| ≤ 1 for h in the Lipschitz class."""
        h = AnchorTestFunction(Configuration((0, 1)), carrier)
        estimate = estimate_gh_difference(
            h, Configuration((2,)), 0, uniform_field, reps=500, seed=3
        )
        assert abs(estimate.estimate) <= 1.0 + 3.0 * estimate.standard_error
        assert estimate.truncation_bound == pytest.approx(math.exp(-30.0))

    def test_second_difference_within_stein_factor(
        self, carrier: FiniteAtoms, uniform_field: DiscreteIntensity
    ) -> None:
        """Second differences respect 3.5/λ + 2.5/(|ξ| + 1)."""
        h = AnchorTestFunction(Configuration((1,)), carrier)
        xi = Configuration((0, 2))
        estimate = estimate_second_difference(h, xi, 0, 1, uniform_field, reps=500, seed=8)
        bound = stein_factor_bound(uniform_field.total_mass, len(xi))
        assert abs(estimate.estimate) <= bound + 3.0 * estimate.standard_error

    def test_stein_factor_bound(self) -> None:
        """The factor is 3.5/λ + 2.5/(|ξ| + 1)."""
        assert stein_factor_bound(1.0, 0) == pytest.approx(6.0)
        with pytest.raises(DomainError):
            stein_factor_bound(0.0, 1)

    def test_coupled_trace_pieces(
        self, carrier: FiniteAtoms, uniform_field: DiscreteIntensity
    ) -> None:
        """Pieces tile [0, horizon] and the difference vanishes after τ."""
        h = AnchorTestFunction(Configuration((0,)), carrier)
        trace = coupled_trace(h, Configuration((1,)), 2, uniform_field, 3.0, seed=5)
        starts = [a for a, _, _ in trace.pieces]
        ends = [b for _, b, _ in trace.pieces]
        assert starts[0] == 0.0
        assert ends[-1] == 3.0
        assert starts[1:] == ends[:-1]
        assert all(value == 0.0 for a, _, value in trace.pieces if a >= trace.extra_lifetime)
        assert all(abs(value) <= 1.0 for _, _, value in trace.pieces)

    @pytest.mark.slow
    def test_stein_equation_residual_vanishes(
        self, carrier: FiniteAtoms, uniform_field: DiscreteIntensity
    ) -> None:
        """𝒜g_h(ξ) = h(ξ) − Po(λ)(h) up to Monte Carlo error."""
        h = AnchorTestFunction(Configuration((0, 1)), carrier)
        residual = stein_equation_residual(
            h, Configuration((2,)), uniform_field, reps=3000, seed=12
        )
        assert residual.within(0.0, n_se=4.0)
