"""Counter-based random streams (Philox) for reproducible sampling.

Sample ``i`` of a stream owns a fixed block range of the Philox counter, so
any chunking of the draw (serial or parallel) produces identical numbers.
One 128-bit Philox block yields four uint64 words; a sample consuming ``k``
uniforms owns ``ceil(k/4)`` blocks.
"""

import numpy as np
from numpy.random import Generator, Philox

_INV53 = 1.0 / (1 << 53)


def blocks_per_sample(k: int) -> int:
    return (k + 3) // 4


def sample_uniforms(seed: int, start: int, count: int, k: int) -> np.ndarray:
    """Uniforms in [0,1) for samples [start, start+count), k values each.

    Chunk-invariant: concatenating calls over adjacent ranges equals one
    big call. Each sample owns whole 4-word blocks, and float64 generation
    consumes exactly one word per value, so block alignment is preserved.
    """
    if count <= 0:
        return np.empty((0, k), dtype=np.float64)
    bps = blocks_per_sample(k)
    gen = Generator(Philox(key=seed, counter=start * bps))
    return gen.random(count * bps * 4).reshape(count, bps * 4)[:, :k]


def substream(seed: int, *path: int) -> Generator:
    """Independent generator addressed by a tuple of non-negative integers."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return Generator(Philox(ss))
