"""Deterministic random-stream derivation.

All Monte-Carlo code in this package derives named child streams from a single
integer seed.  Streams with distinct keys are statistically independent and the
derivation does not depend on the order in which streams are consumed, so
replications can be distributed over any number of workers without changing
the result.
"""

from __future__ import annotations

import numpy as np


def child_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for the child stream of ``seed`` identified by ``key``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def as_rng(seed_or_rng) -> np.random.Generator:
    """Coerce an integer seed (or an existing generator) to a Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)
