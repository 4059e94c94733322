"""The warm-up protocol on a single sector [0, pi/m].

Alice outputs +1.  Bob outputs +1 when c_A = c_R = c_B (optionally only with
probability given by a weight of phi_B - lambda_RB), else -1.
"""

from __future__ import annotations

import math

import numpy as np

from swapsim.oracle import check_warmup_weight, warmup_weight
from swapsim.streams import StreamCursor, shard_spans


def sample_warmup(m: int, phiA: float, phiB: float, lar, lrb, u=None) -> np.ndarray:
    """Agreement indicator per round; ``u`` switches on the weighted variant."""
    ca = phiA < lar
    cr = lar < lrb
    cb = lrb < phiB
    agree = (ca == cr) & (cr == cb)
    if u is not None:
        agree &= u < warmup_weight(m)(phiB - lrb)
    return agree


def warmup_count(m: int, phiA: float, phiB: float, n: int, seed: int, weighted: bool = False) -> int:
    top = math.pi / m
    if not (0.0 <= phiA <= top and 0.0 <= phiB <= top):
        raise ValueError(f"angles must lie in [0, pi/{m}]")
    if weighted:
        check_warmup_weight(m)
    ar = StreamCursor(seed, "warmAR")
    rb = StreamCursor(seed, "warmRB")
    uu = StreamCursor(seed, "warmU")
    hits = 0
    for _, k in shard_spans(n):
        lar = ar.take(k) * top
        lrb = rb.take(k) * top
        u = uu.take(k) if weighted else None
        hits += int(np.count_nonzero(sample_warmup(m, phiA, phiB, lar, lrb, u)))
    return hits
