"""Seeding.

Every sampling call draws from its own PCG64 stream, keyed by the master
seed plus a short tuple of stream labels.  Labels are hashed with CRC32 so the
derivation is stable across Python processes (no ``hash()`` randomisation).
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("seed components must be non-negative")
        return int(part)
    return zlib.crc32(str(part).encode("utf-8"))


def seed_sequence(seed: int, *stream) -> np.random.SeedSequence:
    return np.random.SeedSequence([_key(seed), *(_key(s) for s in stream)])


def make_rng(seed: int, *stream) -> np.random.Generator:
    """PCG64 generator for substream ``stream`` of master ``seed``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *stream)))


def stream_id(seed: int, *stream) -> str:
    """Printable identifier of a substream, echoed into output headers."""
    return f"{seed}:" + "/".join(str(s) for s in stream)
