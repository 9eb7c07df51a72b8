"""Performance benchmarks for the numerical kernels."""

from typing import Any

import numpy as np
import pytest

from stein_poisson.carrier import Configuration, Interval, d1_prime, min_cost_assignment
from stein_poisson.palmexact import bernoulli_process_dist, exact_d2, poisson_reference
from stein_poisson.univariate import BernoulliVector, stein_solution_recursive


@pytest.mark.benchmark
def test_bench_assignment_50(benchmark: Any, rng: np.random.Generator) -> None:
    """Benchmark a 50 x 50 assignment problem."""
    cost = rng.random((50, 50))
    benchmark(min_cost_assignment, cost)


@pytest.mark.benchmark
def test_bench_d1_prime_interval(benchmark: Any, rng: np.random.Generator) -> None:
    """Benchmark d′₁ between configurations of 40 and 35 points."""
    xi = Configuration(tuple(rng.random(40)))
    eta = Configuration(tuple(rng.random(35)))
    benchmark(d1_prime, xi, eta, Interval())


@pytest.mark.benchmark
def test_bench_recursive_solution(benchmark: Any) -> None:
    """Benchmark the Stein solution table for λ = 20."""
    benchmark(stein_solution_recursive, {10, 20, 30}, 20.0, 120)


@pytest.mark.benchmark
def test_bench_exact_d2_bernoulli(benchmark: Any) -> None:
    """Benchmark exact d₂ for a three-atom Bernoulli process."""
    dist = bernoulli_process_dist(BernoulliVector((0.2, 0.3, 0.1)))
    reference = poisson_reference(dist, 1e-8)
    benchmark(exact_d2, dist, reference)
