"""Deterministic, order-independent random substreams.

Every randomized operation derives its generator from (seed, path) where
path is a tuple of integers and short labels, e.g. ``substream(seed,
"trial", 17)``.  Streams are independent Philox counter-based generators,
so results never depend on the order in which trials run or on the degree
of parallelism.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["substream", "child_seed"]


def _encode(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part)
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    raise TypeError(f"substream path parts must be int or str, got {type(part)!r}")


def substream(seed: int, *path) -> np.random.Generator:
    """Generator for the substream addressed by (seed, *path)."""
    key = tuple(_encode(p) for p in path)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *path) -> int:
    """Stable 63-bit integer seed for handing to seed-taking callables."""
    key = tuple(_encode(p) for p in path)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)
