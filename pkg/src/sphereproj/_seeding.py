"""Keyed RNG derivation for order-independent Monte Carlo streams.

Every random draw in the package flows through a generator derived from
``(master_seed, key...)``.  Two calls with the same key yield bit-identical
streams no matter how many other streams were created in between, which is
what makes experiment results independent of worker count and scheduling.
"""

from __future__ import annotations

import numpy as np


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Generator keyed by ``(master_seed, *key)``; independent of call order."""
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)
