"""Random-number contract shared by every stochastic routine.

All randomness comes from numpy's PCG64 bit generator seeded through a
``SeedSequence(seed, spawn_key=(stream,))``. The mapping from
``(seed, stream)`` to a bit stream is platform independent, so identical
inputs reproduce identical samples everywhere.
"""

import numpy as np

GENERATOR_ID = f"numpy-{np.__version__}/PCG64/SeedSequence(seed, spawn_key=(stream,))"


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))
