"""Deterministic, splittable random streams.

All randomness in the package flows through Philox counter-based generators
keyed hierarchically (master seed -> purpose -> trial -> site), so any
experiment is reproducible and order-independent under parallelism.
"""

from __future__ import annotations

import numpy as np

# Purpose tags keep independently-seeded subsystems from colliding.
TAG_GEN_ER = 1
TAG_RESAMPLE_KEEP = 2
TAG_RESAMPLE_FRESH = 3
TAG_TRAJ_TIMES = 4
TAG_TRAJ_FRESH = 5
TAG_SPT_SAMPLE = 6
TAG_COUPLING = 7
TAG_GLAUBER = 8
TAG_TAU = 9
TAG_GUMBEL = 10
TAG_PATH_GIBBS = 11
TAG_BP = 12
TAG_PSI = 13
TAG_TRIAL = 14
TAG_ZTP = 15


def stream(*key: int) -> np.random.Generator:
    """Philox generator keyed by an integer tuple; same key, same stream."""
    ss = np.random.SeedSequence(entropy=list(key))
    return np.random.Generator(np.random.Philox(ss))


def spawn(seed: int, tag: int, count: int) -> list[np.random.Generator]:
    """Independent per-trial streams derived from (seed, tag)."""
    return [stream(seed, tag, i) for i in range(count)]
