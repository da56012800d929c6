"""Deterministic random-number plumbing.

All randomness in the package flows through numpy's PCG64 generator seeded
from explicit integers, so equal seeds give equal streams on every platform.
Child seeds are derived by hashing a label with SHA-256 rather than by
drawing from a parent stream: adding a new consumer never reshuffles the
randomness of existing ones.
"""

from __future__ import annotations

import hashlib

import numpy as np

MAX_SEED = 2**63 - 1


def derive_seed(*parts: object) -> int:
    """Stable 63-bit seed from a sequence of label parts."""
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & MAX_SEED


def generator(seed: int, *parts: object) -> np.random.Generator:
    """PCG64 generator for a seed, optionally scoped by extra label parts."""
    if parts:
        seed = derive_seed(seed, *parts)
    return np.random.Generator(np.random.PCG64(seed))
