"""Deterministic RNG derivation.

Every stochastic component derives its generator from the run seed plus a
fixed component tag (and optional sub-indexes), so adding or reordering
components never shifts another component's stream.
"""

from __future__ import annotations

import numpy as np

SPLIT = 1
RFOREST = 2
SYNTH = 3

__all__ = ["SPLIT", "RFOREST", "SYNTH", "component_rng"]


def component_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for one component; path identifies component and sub-stream."""
    return np.random.default_rng(np.random.SeedSequence([seed, *path]))
