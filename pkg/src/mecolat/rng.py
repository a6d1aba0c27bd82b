"""Named, counter-based random streams.

Every stochastic subsystem (scenario sampling, channel draws, per-trial
transmission simulation) draws from its own Philox stream derived from
(name, seed, *indices). Streams for different names or indices never
overlap, so parallel trials and sweeps stay reproducible for a fixed
user seed.
"""

import zlib

import numpy as np

_MASK32 = 0xFFFFFFFF


def stream(name: str, seed: int, *indices: int) -> np.random.Generator:
    """Return the generator for stream (name, seed, indices).

    The same arguments always yield an identical sequence; distinct
    arguments yield statistically independent sequences.
    """
    tag = zlib.crc32(name.encode("utf-8")) & _MASK32
    key = tuple(int(i) & _MASK32 for i in indices)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(tag,) + key)
    return np.random.Generator(np.random.Philox(seed=ss))


def child_seed(seed: int, *indices: int) -> int:
    """Derive a reproducible 63-bit child seed from (seed, indices).

    Used by the sweep harness so every CSV row carries a seed that
    regenerates its scenario directly.
    """
    key = tuple(int(i) & _MASK32 for i in indices)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
