"""Batch samplers that pull hidden variables from the named streams.

Rounds are processed shard by shard; within a shard each stream is read in
order, so round k here sees exactly the numbers a party in a message-passing
session sees at round k.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from swapsim.protocol_full import sample_full
from swapsim.protocol_one import sample_protocol1
from swapsim.streams import BOB_U, FLIP, LAMBDA_AR, LAMBDA_RB, StreamCursor, scale_lambda, shard_spans


@dataclass
class Counts:
    """Sufficient statistics of a batch of (a, b) outcomes."""

    n: int = 0
    agree: int = 0
    a_plus: int = 0
    b_plus: int = 0

    def add(self, a: np.ndarray, b: np.ndarray) -> None:
        self.n += int(a.size)
        self.agree += int(np.count_nonzero(a == b))
        self.a_plus += int(np.count_nonzero(a == 1))
        self.b_plus += int(np.count_nonzero(b == 1))

    @property
    def product_sum(self) -> int:
        return 2 * self.agree - self.n


class RunCursors:
    """Cursors for one Protocol 1 run index."""

    def __init__(self, seed: int, run: int):
        self.ar = StreamCursor(seed, LAMBDA_AR, run)
        self.rb = StreamCursor(seed, LAMBDA_RB, run)
        self.u = StreamCursor(seed, BOB_U, run)

    def take(self, k: int):
        return scale_lambda(self.ar.take(k)), scale_lambda(self.rb.take(k)), self.u.take(k)


def protocol1_batches(phiA: float, phiB: float, n: int, seed: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    cur = RunCursors(seed, 0)
    for _, k in shard_spans(n):
        lar, lrb, u = cur.take(k)
        r = sample_protocol1(phiA, phiB, lar, lrb, u)
        yield np.asarray(r.a), r.b


def full_batches(x, y, n: int, seed: int, flip: bool = True) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """(a, b) batches of the 9-bit protocol (``flip=False``: Protocol 2 only)."""
    run0, run1 = RunCursors(seed, 0), RunCursors(seed, 1)
    flips = StreamCursor(seed, FLIP)
    for _, k in shard_spans(n):
        lar1, lrb1, u1 = run0.take(k)
        lar2, lrb2, u2 = run1.take(k)
        # with flip disabled every flip draw maps to "no flip"
        fu = flips.take(k) if flip else np.ones(k)
        yield sample_full(x, y, lar1, lrb1, u1, lar2, lrb2, u2, fu)


def count(batches) -> Counts:
    c = Counts()
    for a, b in batches:
        c.add(a, b)
    return c


def collect(batches) -> tuple[np.ndarray, np.ndarray]:
    parts = list(batches)
    if not parts:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
