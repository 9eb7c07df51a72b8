"""Seed handling for reproducible Monte Carlo.

A run is driven by one master seed (a u64). Child streams are derived from it
with :class:`numpy.random.SeedSequence` spawn keys, so a counter uniquely and
deterministically names every stream: ``spawn(seed, 3)`` is the same stream on
every machine and in every process.
"""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

from .errors import DomainError

SeedLike = int | np.random.SeedSequence | np.random.Generator

MAX_SEED = 2**64 - 1
REPLICATION_CHUNK = 4096


def seed_sequence(seed: int | np.random.SeedSequence) -> np.random.SeedSequence:
    """Return the SeedSequence for ``seed``, validating plain integers."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, bool) or not isinstance(seed, int | np.integer):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) <= MAX_SEED:
        raise DomainError(f"seed must lie in [0, 2**64 - 1], got {seed}")
    return np.random.SeedSequence(int(seed))


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Turn a seed, SeedSequence or Generator into a Generator.

    Generators pass through untouched so samplers can be composed while
    sharing a single stream.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed_sequence(seed))


def spawn(seed: SeedLike, *key: int) -> np.random.SeedSequence:
    """Derive the child stream named by ``key`` from ``seed``.

    For a Generator the child is drawn from the generator itself, which keeps
    composition deterministic but ties it to the generator's position.
    """
    if isinstance(seed, np.random.Generator):
        entropy = int(seed.integers(0, 2**63))
        return np.random.SeedSequence(entropy, spawn_key=tuple(key))
    parent = seed_sequence(seed)
    return np.random.SeedSequence(
        parent.entropy, spawn_key=(*parent.spawn_key, *key), pool_size=parent.pool_size
    )


def spawn_generator(seed: SeedLike, *key: int) -> np.random.Generator:
    """Generator for the child stream ``key`` of ``seed``."""
    return np.random.default_rng(spawn(seed, *key))


def replication_chunks(
    seed: SeedLike, reps: int, chunk_size: int = REPLICATION_CHUNK
) -> Iterator[tuple[np.random.Generator, int]]:
    """Split ``reps`` replications into chunks, one child stream per chunk.

    Chunk ``c`` always uses stream ``spawn(seed, c)``, so chunks can be run in
    any order (or in parallel) without changing the result.

    Yields:
        ``(generator, count)`` pairs whose counts sum to ``reps``.
    """
    if reps < 1:
        raise DomainError(f"reps must be >= 1, got {reps}")
    if isinstance(seed, np.random.Generator):
        yield seed, reps
        return
    done = 0
    chunk = 0
    while done < reps:
        count = min(chunk_size, reps - done)
        yield spawn_generator(seed, chunk), count
        done += count
        chunk += 1
