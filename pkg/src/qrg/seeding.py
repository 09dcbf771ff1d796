"""Reproducible per-replica random streams and a parallel replica runner.

Replica ``r`` of stream ``tag`` under master seed ``m`` gets the 64-bit seed

    splitmix64((m + (r + 1) * 0x9E3779B97F4A7C15 + tag * 0xD1B54A32D192ED03) mod 2**64)

which feeds a PCG64 generator.  The stream depends only on ``(m, tag, r)``, so
results do not change with the number of worker processes.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
TAG_MIX = 0xD1B54A32D192ED03
SEED_ENV = "QRG_SEED"


def splitmix64(x: int) -> int:
    z = (x + GOLDEN) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def replica_seed(master: int, replica: int, tag: int = 0) -> int:
    if replica < 0:
        raise DomainError("replica index must be nonnegative")
    return splitmix64((master + (replica + 1) * GOLDEN + tag * TAG_MIX) & MASK)


def replica_rng(master: int, replica: int, tag: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(replica_seed(master, replica, tag)))


def resolve_seed(seed: int | None) -> int:
    """Explicit seed, else ``$QRG_SEED``, else 0."""
    if seed is not None:
        return int(seed) & MASK
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env, 0) & MASK
        except ValueError as exc:
            raise DomainError(f"{SEED_ENV} is not an integer: {env!r}") from exc
    return 0


def _call(job):
    fn, master, index, tag, args = job
    return fn(replica_rng(master, index, tag), *args)


def run_replicas(fn: Callable, count: int, master: int, *, tag: int = 0, args: Sequence = (),
                 workers: int = 1) -> list:
    """``[fn(rng_r, *args) for r in range(count)]`` with per-replica streams.

    With ``workers > 1`` the calls are spread over processes; ``fn`` must then
    be picklable (a module-level function).  Output order is by replica index.
    """
    if count < 0:
        raise DomainError("count must be nonnegative")
    if workers < 1:
        raise DomainError("workers must be at least 1")
    jobs = [(fn, master, r, tag, tuple(args)) for r in range(count)]
    if workers == 1 or count <= 1:
        return [_call(j) for j in jobs]
    chunk = max(1, count // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_call, jobs, chunksize=chunk))
