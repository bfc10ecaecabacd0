"""Seed handling.

All stochastic operations use numpy's PCG64 generator.  Derived streams
(per dataset, per restart, per permutation block) come from
``SeedSequence(seed).generate_state``, so every pipeline is reproducible
from one integer seed.
"""

import numpy as np


def as_rng(seed):
    """Return a PCG64 Generator from an int seed, SeedSequence, or pass a
    Generator through unchanged."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def child_seeds(seed, n):
    """Derive ``n`` independent integer seeds from one seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)]
