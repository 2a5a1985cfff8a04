"""Seed splitting shared by every Monte Carlo routine.

One user seed feeds ``SeedSequence(seed, spawn_key=(tag,))`` per experiment
tag; that sequence is split into one child per fixed-size chunk of trials.
Chunk boundaries never depend on the worker count, so results are identical
for any ``threads`` value.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .phasor import ValidationError

T = TypeVar("T")

CHUNK_SIZE = 1 << 16

# experiment tags
IFM = 1
TOY = 2
EVENTS = 3
SOURCE = 4
GAMMA_LEFT = 5
GAMMA_RIGHT = 6


def seed_sequence(seed: int, tag: int, *extra: int) -> np.random.SeedSequence:
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(seed, spawn_key=(tag, *extra))


def chunk_rng(seed: int, tag: int, *extra: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, tag, *extra))


def chunk_sizes(n: int, chunk_size: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def map_chunk_indices(
    fn: Callable[[int, int], T], n: int, *, threads: int = 1, chunk_size: int = CHUNK_SIZE
) -> list[T]:
    """Run ``fn(chunk_index, count)`` over chunks of ``n`` trials, in chunk order."""
    jobs = list(enumerate(chunk_sizes(n, chunk_size)))
    if threads <= 1 or len(jobs) <= 1:
        return [fn(c, m) for c, m in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def map_chunks(
    fn: Callable[[np.random.Generator, int], T],
    seed: int,
    tag: int,
    n: int,
    *extra: int,
    threads: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> list[T]:
    """Run ``fn(rng, count)`` over chunks of ``n`` trials; results in chunk order."""
    sizes = chunk_sizes(n, chunk_size)
    children = seed_sequence(seed, tag, *extra).spawn(len(sizes))
    jobs = [(np.random.default_rng(c), m) for c, m in zip(children, sizes)]
    if threads <= 1 or len(jobs) <= 1:
        return [fn(g, m) for g, m in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))
