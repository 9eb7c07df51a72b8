"""Tests for Poisson tables, the Stein equation and independent sums."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stein_poisson.errors import DomainError, ResourceLimitError
from stein_poisson.univariate import (
    BernoulliVector,
    PmfTable,
    chen_identity_residual,
    chen_truncation_bound,
    check_delta_bound,
    count_imdeath_law,
    count_imdeath_mean,
    dtv_bound_independent,
    exact_dtv_poisson_binomial,
    expected_reciprocal_count,
    order_ratio_study,
    poisson_binomial_pmf,
    poisson_pmf,
    simulate_count_imdeath,
    stein_solution_probabilistic,
    stein_solution_recursive,
    total_variation,
)

probabilities = st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=10)


class TestTables:
    """Tests for pmf tables and total variation."""

    def test_bernoulli_vector_validation(self) -> None:
        """Probabilities outside [0, 1] are rejected."""
        with pytest.raises(DomainError):
            BernoulliVector((0.5, 1.2))

    def test_pmf_table_mass(self) -> None:
        """A table plus its tail must carry unit mass."""
        with pytest.raises(DomainError):
            PmfTable(np.array([0.5, 0.4]))
        table = PmfTable(np.array([0.5, 0.4]), tail_mass=0.1)
        assert table.mass({0, 1}) == pytest.approx(0.9)
        assert table.mass({1}, cofinal=True) == pytest.approx(0.5)
        assert table[7] == 0.0

    @pytest.mark.parametrize("lam", [0.0, 0.3, 1.0, 7.5, 40.0])
    def test_poisson_table_is_complete(self, lam: float) -> None:
        """Tabulated mass plus the exact tail is 1."""
        table = poisson_pmf(lam)
        assert math.fsum(table.probabilities) + table.tail_mass == pytest.approx(1.0, abs=1e-12)
        assert table.mean() == pytest.approx(lam, abs=1e-8)

    def test_poisson_rejects_negative_rate(self) -> None:
        """Negative and infinite rates are domain errors."""
        for lam in (-0.1, math.inf):
            with pytest.raises(DomainError):
                poisson_pmf(lam)

    def test_poisson_binomial(self) -> None:
        """Two fair coins give 1/4, 1/2, 1/4."""
        table = poisson_binomial_pmf(BernoulliVector((0.5, 0.5)))
        np.testing.assert_allclose(table.probabilities, [0.25, 0.5, 0.25])
        skewed = poisson_binomial_pmf(BernoulliVector((0.1, 0.2)))
        np.testing.assert_allclose(skewed.probabilities, [0.72, 0.26, 0.02])

    def test_total_variation(self) -> None:
        """d_TV is zero on identical laws and one on disjoint ones."""
        assert total_variation(poisson_pmf(2.0), poisson_pmf(2.0)) == 0.0
        point_mass = PmfTable(np.array([0.0, 0.0, 0.0, 1.0]))
        assert total_variation(poisson_pmf(0.0, 2), point_mass) == pytest.approx(1.0)

    def test_total_variation_counts_tails(self) -> None:
        """Tail masses act as one extra symbol."""
        first = PmfTable(np.array([0.5]), tail_mass=0.5)
        second = PmfTable(np.array([1.0]))
        assert total_variation(first, second) == pytest.approx(0.5)


class TestSteinEquation:
    """Tests for the recursive and probabilistic Stein solutions."""

    @pytest.mark.parametrize(
        ("target", "lam", "cutoff"),
        [
            ({0}, 1.0, 5),
            ({2, 3}, 2.5, 20),
            ({0, 4, 9}, 7.0, 40),
            (set(), 3.0, 15),
            ({30}, 20.0, 90),
        ],
    )
    def test_recursive_solution_satisfies_equation(
        self, target: set[int], lam: float, cutoff: int
    ) -> None:
        """The table solves the equation at every tabulated w."""
        f = stein_solution_recursive(target, lam, cutoff)
        assert f.residual() <= 1e-10
        assert f.values[0] == 0.0

    def test_first_value(self) -> None:
        """f(1) = (1_A(0) − Po(λ)(A)) / λ."""
        f = stein_solution_recursive({0}, 1.0, 5)
        assert f.values[1] == pytest.approx(1.0 - math.exp(-1.0))

    def test_cofinal_target(self) -> None:
        """A cofinal target carries the Poisson tail beyond the cutoff."""
        f = stein_solution_recursive({5}, 2.0, 5, cofinal=True)
        assert f.target_mass == pytest.approx(poisson_pmf(2.0, 4).tail_mass)
        assert f.residual() <= 1e-10

    def test_deep_tail_cutoff(self) -> None:
        """π_N underflows at N = 200 for λ = 0.1; the table still solves the equation."""
        assert poisson_pmf(0.1, 200)[200] == 0.0
        deep = stein_solution_recursive({0}, 0.1, 200)
        short = stein_solution_recursive({0}, 0.1, 20)
        assert np.all(np.isfinite(deep.values))
        assert deep.residual() <= 1e-10
        np.testing.assert_allclose(deep.values[:21], short.values[:21], rtol=1e-9, atol=1e-14)

    def test_deep_tail_cofinal(self) -> None:
        """A cofinal target past an underflowed π_N also gets a finite solution."""
        f = stein_solution_recursive({3}, 0.1, 200, cofinal=True)
        assert np.all(np.isfinite(f.values))
        assert f.residual() <= 1e-10

    @pytest.mark.parametrize(("target", "lam", "cutoff"), [({0}, 0.0, 5), ({6}, 1.0, 5)])
    def test_recursive_domain(self, target: set[int], lam: float, cutoff: int) -> None:
        """λ must be positive and A must sit inside {0..N}."""
        with pytest.raises(DomainError):
            stein_solution_recursive(target, lam, cutoff)

    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 5.0])
    def test_delta_bound_holds_for_every_subset(self, lam: float) -> None:
        """|Δf_A| ≤ (1 − e^{−λ})/λ for all A ⊆ {0..10}."""
        report = check_delta_bound(lam, 10)
        assert report.subsets == 2**11
        assert report.passed
        assert report.max_ratio <= 1.0 + 1e-9
        assert report.max_residual <= 1e-9

    def test_delta_bound_enumeration_cap(self) -> None:
        """Subset enumeration refuses N above 12."""
        with pytest.raises(ResourceLimitError):
            check_delta_bound(1.0, 13)

    @pytest.mark.parametrize("lam", [0.7, 3.0])
    def test_chen_identity_on_poisson(self, lam: float) -> None:
        """E[λ f(W+1) − W f(W)] vanishes for W ~ Po(λ) up to truncation."""
        pmf = poisson_pmf(lam, 12)
        f = stein_solution_recursive({1, 2}, lam, 12)
        residual = chen_identity_residual(pmf, lam, f)
        assert abs(residual) <= chen_truncation_bound(pmf, lam, f) + 1e-12

    def test_chen_identity_needs_long_enough_solution(self) -> None:
        """P may not be tabulated beyond the solution."""
        with pytest.raises(DomainError):
            chen_identity_residual(poisson_pmf(1.0, 20), 1.0, stein_solution_recursive({0}, 1.0, 5))

    @pytest.mark.parametrize(("target", "lam", "w"), [({0}, 1.0, 1), ({1, 2}, 2.0, 3)])
    def test_probabilistic_matches_recursive(self, target: set[int], lam: float, w: int) -> None:
        """The coupled chain estimate agrees with the exact table."""
        exact = stein_solution_recursive(target, lam, 30).values[w]
        estimate = stein_solution_probabilistic(target, lam, w, 4000, seed=11)
        assert estimate.replications == 4000
        assert estimate.truncation_bound == pytest.approx(math.exp(-30.0))
        assert estimate.within(exact, n_se=4.0)

    def test_probabilistic_is_reproducible(self) -> None:
        """The same seed gives the same estimate."""
        first = stein_solution_probabilistic({0}, 1.0, 2, 200, seed=3)
        second = stein_solution_probabilistic({0}, 1.0, 2, 200, seed=3)
        assert first == second

    def test_probabilistic_domain(self) -> None:
        """w = 0 and cofinal sets without a cutoff are rejected."""
        with pytest.raises(DomainError):
            stein_solution_probabilistic({0}, 1.0, 0, 10, seed=0)
        with pytest.raises(DomainError):
            stein_solution_probabilistic({0}, 1.0, 1, 10, seed=0, cofinal=True)

    def test_probabilistic_empty_target(self) -> None:
        """f ≡ 0 when A is empty."""
        assert stein_solution_probabilistic(set(), 1.0, 3, 10, seed=0).estimate == 0.0


class TestIndependentSums:
    """Tests for the Poisson-binomial error bound."""

    def test_bound_on_empty_vector(self) -> None:
        """No indicators, no error."""
        assert dtv_bound_independent(BernoulliVector(())) == 0.0

    @pytest.mark.property
    @given(probabilities)
    def test_bound_dominates_exact_distance(self, p: list[float]) -> None:
        """d_TV(L(W), Po(λ)) ≤ (1 ∧ 1/λ) Σ p_i²."""
        vector = BernoulliVector(tuple(p))
        assert exact_dtv_poisson_binomial(vector) <= dtv_bound_independent(vector) + 1e-12

    def test_order_ratio_study(self) -> None:
        """The bound is never violated and d_TV stays within a constant of Σ p_i²."""
        summary = order_ratio_study(200, max_n=8, seed=5)
        assert summary.violations == 0
        assert 0.0 < summary.min_ratio <= summary.max_ratio <= 1.0

    def test_expected_reciprocal_count(self) -> None:
        """E[1/(S + 1)] matches direct enumeration."""
        p = BernoulliVector((0.3, 0.4, 0.8))
        direct = 0.0
        for x1 in (0, 1):
            for x2 in (0, 1):
                weight = (0.4 if x1 else 0.6) * (0.8 if x2 else 0.2)
                direct += weight / (x1 + x2 + 1)
        assert expected_reciprocal_count(p, 0) == pytest.approx(direct)
        with pytest.raises(DomainError):
            expected_reciprocal_count(p, 3)


class TestCountChain:
    """Tests for the count immigration-death chain."""

    def test_trajectory_is_consistent(self) -> None:
        """Steps are ±1, times increase and the count never goes negative."""
        path = simulate_count_imdeath(3, 2.0, 5.0, seed=1)
        assert all(step in (-1, 1) for step in path.steps)
        assert list(path.times) == sorted(path.times)
        assert all(path.state_at(t) >= 0 for t in path.times)
        assert path.state_at(path.horizon) == path.final
        assert path.state_at(0.0) == 3

    def test_empty_chain_stays_empty(self) -> None:
        """With λ = 0 and no individuals nothing ever happens."""
        path = simulate_count_imdeath(0, 0.0, 10.0, seed=0)
        assert path.times == ()
        assert path.final == 0

    def test_simulation_domain(self) -> None:
        """Negative horizons, counts and rates are rejected."""
        with pytest.raises(DomainError):
            simulate_count_imdeath(0, 1.0, -1.0, seed=0)
        with pytest.raises(DomainError):
            simulate_count_imdeath(-1, 1.0, 1.0, seed=0)

    def test_exact_law_matches_mean(self) -> None:
        """The survivor-plus-immigrant law has the closed-form mean."""
        law = count_imdeath_law(4, 3.0, 0.7)
        assert law.mean() == pytest.approx(count_imdeath_mean(4, 3.0, 0.7), abs=1e-9)

    def test_simulated_mean(self) -> None:
        """Simulated Z(t) has the closed-form mean."""
        finals = [simulate_count_imdeath(5, 2.0, 1.0, seed=s).final for s in range(2000)]
        mean = float(np.mean(finals))
        se = float(np.std(finals, ddof=1) / math.sqrt(len(finals)))
        assert abs(mean - count_imdeath_mean(5, 2.0, 1.0)) <= 5.0 * se
