"""Seedable, splittable random streams on the counter-based Philox generator.

A stream is addressed by ``(seed, *keys)``; equal addresses give identical
draws regardless of execution order, so sweep points can run in parallel.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *keys: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))
