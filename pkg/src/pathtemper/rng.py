"""Deterministic random streams for replica ensembles.

Every chain owns a counter-based (Philox) stream keyed by (seed, lane,
chain index), so the variates one chain consumes never depend on what the
other chains did. Runs are therefore bit-reproducible no matter how the
per-chain exploration work is scheduled. Lanes separate exploration draws
from swap-decision uniforms and initial-state draws.
"""
from __future__ import annotations

import numpy as np

EXPLORE_LANE = 0
SWAP_LANE = 1
INIT_LANE = 2
SCRATCH_LANE = 3

_MASK64 = (1 << 64) - 1


def stream(seed: int, lane: int = SCRATCH_LANE, index: int = 0) -> np.random.Generator:
    """Independent generator for (seed, lane, index)."""
    key = np.array(
        [seed & _MASK64, ((lane & 0xFFFF) << 32) | (index & 0xFFFFFFFF)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


class ReplicaStreams:
    """Per-chain exploration streams plus shared swap and init streams."""

    def __init__(self, seed: int, n_chains: int):
        self.seed = seed
        self.n_chains = n_chains
        self.explore = [stream(seed, EXPLORE_LANE, c) for c in range(n_chains)]
        self.swap = stream(seed, SWAP_LANE)
        self.init = stream(seed, INIT_LANE)
