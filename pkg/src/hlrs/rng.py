"""Counter-based random streams.

Every draw is addressed by ``(seed, purpose, index)``: the Philox key is
derived from ``(seed, purpose)`` and ``index`` (a path or sample number)
occupies the top word of the 256-bit counter.  Streams for different indices
never overlap, so results do not depend on how indices are split across
workers or in which order they are generated.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["GAUSSIAN", "MIXING", "DEFAULT_SEED", "generator", "normals", "uniforms"]

#: stream purposes; mixing and Gaussian draws never share a key
GAUSSIAN = 0
MIXING = 1

DEFAULT_SEED = 20240607


@lru_cache(maxsize=64)
def _key(seed: int, purpose: int) -> tuple:
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    state = np.random.SeedSequence([int(seed), int(purpose)]).generate_state(2, np.uint64)
    return tuple(int(v) for v in state)


def generator(seed: int, purpose: int, index: int) -> np.random.Generator:
    """Generator for one ``(seed, purpose, index)`` stream."""
    key = np.array(_key(int(seed), int(purpose)), dtype=np.uint64)
    counter = np.array([0, 0, 0, int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def normals(seed: int, purpose: int, indices, size: int) -> np.ndarray:
    """Array of shape ``(len(indices), size)``; row ``k`` is stream ``indices[k]``."""
    indices = np.asarray(indices, dtype=np.int64)
    out = np.empty((indices.size, int(size)))
    for row, idx in enumerate(indices):
        out[row] = generator(seed, purpose, idx).standard_normal(int(size))
    return out


def uniforms(seed: int, purpose: int, indices) -> np.ndarray:
    """One uniform in (0, 1) per stream index."""
    indices = np.asarray(indices, dtype=np.int64)
    out = np.empty(indices.size)
    for row, idx in enumerate(indices):
        out[row] = generator(seed, purpose, idx).random()
    return out
