"""Named, independent random streams.

Every random quantity in a run is drawn from a stream keyed by
``(seed, stream id, *indices)``.  Keys never depend on scheduling, so a
result is reproducible bit for bit regardless of how work is split across
processes.
"""

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    LAYOUT = 0
    SHADOWING = 1
    SMALL_SCALE = 2
    ESTIMATE = 3
    ERROR = 4
    SYMBOLS = 5
    NOISE = 6


def stream(seed, which, *index):
    """Return a generator for stream ``which`` at ``index`` under ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(which), *map(int, index)))
    return np.random.default_rng(ss)


def as_generator(seed, which=None):
    """Accept an int seed, a SeedSequence or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    if which is None:
        return np.random.default_rng(seed)
    return stream(seed, which)


def complex_normal(rng, shape):
    """Circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
