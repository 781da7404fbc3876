"""Seeded random streams.

Trajectories are drawn in fixed blocks of ``BLOCK_SIZE``; block ``b`` of a run
seeded with ``seed`` uses ``SeedSequence(seed, spawn_key=(b,))`` with the PCG64
bit generator. A block is therefore reproducible on its own, whichever worker
draws it.
"""

import numpy as np

BLOCK_SIZE = 4096


def block_generator(seed, block):
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.PCG64(sequence))


def draw_blocks(seed, n, sampler):
    """Concatenate ``sampler(rng, size)`` over the blocks covering ``n`` draws."""
    chunks = []
    for block, start in enumerate(range(0, n, BLOCK_SIZE)):
        size = min(BLOCK_SIZE, n - start)
        chunks.append(np.asarray(sampler(block_generator(seed, block), size)))
    if not chunks:
        return np.empty(0)
    return np.concatenate(chunks)
