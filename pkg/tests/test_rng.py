"""Tests for seed handling and child streams."""

import numpy as np
import pytest

from stein_poisson.errors import DomainError
from stein_poisson.rng import (
    MAX_SEED,
    as_generator,
    replication_chunks,
    seed_sequence,
    spawn,
    spawn_generator,
)


class TestSeedSequence:
    """Tests for seed validation."""

    @pytest.mark.parametrize("seed", [0, 1, 12345, MAX_SEED])
    def test_accepts_u64(self, seed: int) -> None:
        """Every u64 is a valid master seed."""
        assert seed_sequence(seed).entropy == seed

    @pytest.mark.parametrize("seed", [-1, MAX_SEED + 1, 1.5, "7", True])
    def test_rejects_everything_else(self, seed: object) -> None:
        """Negative, oversized and non-integer seeds are domain errors."""
        with pytest.raises(DomainError):
            seed_sequence(seed)  # type: ignore[arg-type]

    def test_passes_seed_sequence_through(self) -> None:
        """A SeedSequence is returned as is."""
        sequence = np.random.SeedSequence(5)
        assert seed_sequence(sequence) is sequence


class TestSpawn:
    """Tests for deterministic child streams."""

    def test_same_key_same_stream(self) -> None:
        """A key names exactly one stream."""
        first = spawn_generator(42, 3).random(5)
        second = spawn_generator(42, 3).random(5)
        np.testing.assert_array_equal(first, second)

    def test_different_keys_differ(self) -> None:
        """Sibling streams are distinct."""
        first = spawn_generator(42, 0).random(5)
        assert not np.array_equal(first, spawn_generator(42, 1).random(5))

    def test_nested_keys_compose(self) -> None:
        """spawn(spawn(s, a), b) names the same stream as spawn(s, a, b)."""
        nested = np.random.default_rng(spawn(spawn(9, 2), 4)).random(3)
        flat = spawn_generator(9, 2, 4).random(3)
        np.testing.assert_array_equal(nested, flat)

    def test_generator_passes_through(self) -> None:
        """as_generator never re-seeds an existing generator."""
        rng = np.random.default_rng(0)
        assert as_generator(rng) is rng


class TestReplicationChunks:
    """Tests for chunked replication streams."""

    def test_counts_sum_to_reps(self) -> None:
        """Chunk counts cover the requested replications exactly."""
        counts = [count for _, count in replication_chunks(1, 10_000, chunk_size=4096)]
        assert counts == [4096, 4096, 1808]

    def test_chunks_are_independent_of_order(self) -> None:
        """Chunk c always uses stream spawn(seed, c)."""
        chunks = list(replication_chunks(7, 300, chunk_size=100))
        np.testing.assert_array_equal(chunks[2][0].random(4), spawn_generator(7, 2).random(4))

    def test_rejects_zero_reps(self) -> None:
        """At least one replication is required."""
        with pytest.raises(DomainError):
            list(replication_chunks(1, 0))
