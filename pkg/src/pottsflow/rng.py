"""Reproducible random streams derived from one 64-bit seed.

Every stream is a Philox (counter-based) generator keyed by the root seed and a
(replica, purpose) spawn key, so parallel replicas never share state and the
output does not depend on scheduling.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class Purpose(IntEnum):
    CHAIN = 0
    COUPLING = 1
    RATIO = 2
    MISC = 3


def stream(seed: int, replica: int = 0, purpose: int = Purpose.CHAIN) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & 0xFFFF_FFFF_FFFF_FFFF, spawn_key=(int(replica), int(purpose)))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an int seed, or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    return stream(0 if rng is None else int(rng))
