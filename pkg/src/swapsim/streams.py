"""Named, splittable random streams derived from one master seed.

Every source of randomness in a session (each shared hidden variable, Bob's
private coin, Alice's flip bit, ...) is an independent Philox stream keyed by
``(name, run, shard)``.  Rounds are grouped into fixed-size shards so that a
batch sampler and a round-by-round party consume exactly the same numbers.
"""

from __future__ import annotations

import math
import os
import zlib

import numpy as np

SHARD_ROUNDS = 1 << 18
SEED_ENV = "SWAPSIM_SEED"
DEFAULT_SEED = 20120831

LAMBDA_AR = "lambdaAR"
LAMBDA_RB = "lambdaRB"
BOB_U = "bobU"
FLIP = "flip"


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, DEFAULT_SEED))


def stream_code(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def substream(seed: int, name: str, run: int = 0, shard: int = 0) -> np.random.Generator:
    """Independent generator for (seed, name, run, shard)."""
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    ss = np.random.SeedSequence(seed, spawn_key=(stream_code(name), run, shard))
    return np.random.Generator(np.random.Philox(ss))


class StreamCursor:
    """Sequential reader of uniform doubles over the shards of one stream."""

    def __init__(self, seed: int, name: str, run: int = 0, start: int = 0):
        self.seed = seed
        self.name = name
        self.run = run
        self.position = 0
        self._shard = -1
        self._rng: np.random.Generator | None = None
        if start:
            self.skip(start)

    def _generator(self) -> np.random.Generator:
        shard = self.position // SHARD_ROUNDS
        if shard != self._shard:
            self._rng = substream(self.seed, self.name, self.run, shard)
            self._shard = shard
            offset = self.position - shard * SHARD_ROUNDS
            if offset:
                self._rng.random(offset)
        return self._rng

    def skip(self, n: int) -> None:
        self.position += n
        self._shard = -1

    def take(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.float64)
        filled = 0
        while filled < n:
            room = SHARD_ROUNDS - self.position % SHARD_ROUNDS
            k = min(room, n - filled)
            out[filled : filled + k] = self._generator().random(k)
            filled += k
            self.position += k
        return out

    def next(self) -> float:
        return float(self.take(1)[0])


def lambda_cursor(seed: int, name: str, run: int = 0) -> StreamCursor:
    return StreamCursor(seed, name, run)


def scale_lambda(u):
    """Uniform [0, 1) draws to hidden variables on [0, pi/4)."""
    return u * (math.pi / 4.0)


def shard_spans(n: int):
    """(start, size) pairs covering n rounds aligned on shard boundaries."""
    start = 0
    while start < n:
        size = min(SHARD_ROUNDS - start % SHARD_ROUNDS, n - start)
        yield start, size
        start += size


def derive_seed(seed: int, *keys: int) -> int:
    """Child master seed, e.g. one per setting pair of an experiment."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
