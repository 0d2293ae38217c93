"""Seeding helpers.

All randomness in the package flows through numpy's PCG64 generator.
Independent work units (simulation replications, pool draws) get their
own substream derived from the master seed and an integer path, so
results do not depend on execution order or worker count.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "child_seed"]


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the substream addressed by ``path`` under ``seed``.

    ``make_rng(s)`` is the root stream; ``make_rng(s, k)`` is the k-th
    child (one per replication index by convention); deeper paths
    address nested units such as ``(rep, stage)``.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(path)))


def child_seed(seed: int, *path: int) -> int:
    """64-bit seed for the substream addressed by ``path``.

    Use when an API takes an integer seed rather than a Generator.
    """
    ss = np.random.SeedSequence(seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0])
