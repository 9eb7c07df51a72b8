"""Performance benchmarks for logging module."""

from typing import Any

import pytest

from stein_poisson.logging import get_logger, log_fields, setup_logging


@pytest.mark.benchmark
def test_bench_get_logger(benchmark: Any) -> None:
    """Benchmark get_logger() call."""
    benchmark(get_logger, "stein_poisson.benchmark")


@pytest.mark.benchmark
def test_bench_setup_logging(benchmark: Any) -> None:
    """Benchmark setup_logging() at the default level."""
    benchmark(setup_logging)


@pytest.mark.benchmark
def test_bench_log_fields(benchmark: Any) -> None:
    """Benchmark building the structured ``extra`` mapping."""
    benchmark(log_fields, reps=10_000, value=0.25, se=0.01)
