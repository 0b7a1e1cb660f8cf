"""Deterministic seed derivation.

Every stochastic component of the toolkit derives its generator from a
master seed plus an integer stream path, so that trials, samples and epochs
can be dispatched in any order (or in parallel) without changing results.
"""

from __future__ import annotations

import numpy as np

# stream namespaces; first element of every spawn key
STREAM_SAMPLE = 0
STREAM_SHUFFLE = 1
STREAM_TRIAL = 2
STREAM_INIT = 3
STREAM_EVAL = 4


def derive_seed(master: int, *path: int) -> int:
    """Stable u64 child seed for (master, path)."""
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


def rng_for(master: int, *path: int) -> np.random.Generator:
    """Generator seeded from the derived child seed."""
    return np.random.default_rng(derive_seed(master, *path))
