"""Deterministic derivation of independent random substreams.

Every stochastic consumer gets its own 64-bit seed hashed from
(master seed, purpose string, index), so reruns with the same master seed
are bit-identical on the same build regardless of evaluation order.
"""

from __future__ import annotations

from hashlib import blake2b

import numpy as np


def substream_seed(master_seed: int, purpose: str, index: int = 0) -> int:
    digest = blake2b(
        f"{int(master_seed)}|{purpose}|{int(index)}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


def substream_rng(master_seed: int, purpose: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(substream_seed(master_seed, purpose, index))
