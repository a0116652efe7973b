"""Deterministic RNG derivation for parallel-safe, reproducible trials."""

from __future__ import annotations

import numpy as np

_MASK63 = (1 << 63) - 1


def derive_seed(master_seed: int, *path: int) -> int:
    """Collapse (master_seed, *path) into a single 63-bit integer seed.

    The mapping goes through ``np.random.SeedSequence`` so sibling paths give
    statistically independent streams regardless of execution order.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed) & _MASK63,
                                spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0]) & _MASK63


def derive_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Generator for the trial addressed by ``path`` under ``master_seed``."""
    ss = np.random.SeedSequence(entropy=int(master_seed) & _MASK63,
                                spawn_key=tuple(int(p) for p in path))
    return np.random.default_rng(ss)


def as_master_seed(seed_or_rng) -> int:
    """Accept an integer seed or a Generator and return an integer master seed.

    Drawing the seed from a Generator keeps callers that pass ``rng`` handles
    deterministic while letting trial workers re-derive their own streams.
    """
    if isinstance(seed_or_rng, np.random.Generator):
        return int(seed_or_rng.integers(0, _MASK63))
    return int(seed_or_rng) & _MASK63
