"""Benchmark fixtures.

Benchmarks are disabled by default (``--benchmark-disable`` in addopts); run
them with ``doit benchmark``.
"""

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    """Fixed-seed generator so every run times the same inputs."""
    return np.random.default_rng(20240917)
