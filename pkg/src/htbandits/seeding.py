"""Deterministic random-stream derivation.

Every consumer of randomness in a simulation gets its own generator, keyed by
``(base_seed, rep, arm, purpose)``.  Streams for different keys are
statistically independent, and adding a new consumer never shifts the draws
seen by existing ones.  Philox is counter-based, so the mapping from key to
stream is stable across processes and platforms.
"""

import numpy as np

__all__ = [
    "REWARDS",
    "TREE_NOISE",
    "ELIMINATION_NOISE",
    "PERTURBATION_NOISE",
    "GENERIC",
    "derive_stream",
]

# Purpose codes. Keep values stable: they are part of the seeding contract.
REWARDS = 0
TREE_NOISE = 1
ELIMINATION_NOISE = 2
PERTURBATION_NOISE = 3
GENERIC = 4


def derive_stream(
    base_seed: int, rep: int, arm: int = 0, purpose: int = GENERIC
) -> np.random.Generator:
    """Return the generator for one ``(base_seed, rep, arm, purpose)`` key.

    Parameters
    ----------
    base_seed : int
        Experiment-level seed, non-negative.
    rep : int
        Repetition index, non-negative.
    arm : int
        Arm index the stream belongs to (0 when not arm-specific).
    purpose : int
        One of the purpose codes exported by this module.

    Returns
    -------
    numpy.random.Generator
        Generator backed by Philox seeded from the key tuple.
    """
    key = (int(base_seed), int(rep), int(arm), int(purpose))
    if any(part < 0 for part in key):
        raise ValueError(f"seed key components must be non-negative, got {key}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=key)))
