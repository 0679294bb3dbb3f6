"""Counter-based random streams keyed by ``(seed, trial, ...)``.

Every stream is a Philox generator whose key is derived from the seed and the
given labels, so trial ``k`` draws the same numbers whether trials run
serially, in parallel, or alone.
"""
from __future__ import annotations

import hashlib

import numpy as np


def _key_int(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label)
    digest = hashlib.sha256(str(label).encode()).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(seed: int, *labels) -> np.random.Generator:
    """Independent generator for ``(seed, *labels)``; labels are ints or strings."""
    entropy = [int(seed)] + [_key_int(x) for x in labels]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
