"""Naive chain protocol for entanglement swapping through extra referees.

With N referees there are N + 1 independent hidden variables on [0, pi/m]
along the line Alice - R1 - ... - RN - Bob.  Alice and Bob agree iff every
neighbouring Iverson bracket in

    [phi_A < l_1], [l_1 < l_2], ..., [l_{N+1} < phi_B]

takes the same value.  The condition is evaluated omnisciently; no message
accounting is attempted.  For two referees the agreement probability is
(m^3 / 6 pi^3) |phi_A - phi_B|^3.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from swapsim.streams import StreamCursor, derive_seed, shard_spans

DEFAULT_REFEREES = 2


@dataclass(frozen=True)
class ChainHiddenVariables:
    lambdas: tuple[float, ...]
    m: int

    def __post_init__(self):
        top = math.pi / self.m
        for v in self.lambdas:
            if not 0.0 <= v <= top:
                raise ValueError(f"chain variable {v} outside [0, pi/{self.m}]")


def _check_angles(m, phiA, phiB):
    top = math.pi / m
    for name, v in (("phi_A", phiA), ("phi_B", phiB)):
        if not 0.0 <= v <= top:
            raise ValueError(f"{name}={v} outside [0, pi/{m}]")


def chain_agree(phiA, phiB, lambdas) -> np.ndarray:
    """Vectorised bracket-equality test; ``lambdas`` is a sequence of arrays."""
    points = [phiA, *lambdas, phiB]
    brackets = [np.asarray(points[i] < points[i + 1]) for i in range(len(points) - 1)]
    agree = np.ones(np.broadcast(*brackets).shape, dtype=bool)
    for left, right in zip(brackets, brackets[1:]):
        agree &= left == right
    return agree


def run_chain_round(m: int, phiA: float, phiB: float, chv: ChainHiddenVariables) -> int:
    _check_angles(m, phiA, phiB)
    if chv.m != m:
        raise ValueError("hidden variables were drawn for a different m")
    return int(chain_agree(phiA, phiB, chv.lambdas))


def chain_agreement_closed_form(m: int, phiA: float, phiB: float) -> float:
    _check_angles(m, phiA, phiB)
    return m**3 / (6.0 * math.pi**3) * abs(phiA - phiB) ** 3


def chain_count(m: int, phiA: float, phiB: float, n: int, seed: int,
                referees: int = DEFAULT_REFEREES) -> int:
    """Number of agreeing rounds out of n."""
    _check_angles(m, phiA, phiB)
    top = math.pi / m
    cursors = [StreamCursor(seed, f"chain{i}") for i in range(referees + 1)]
    hits = 0
    for _, k in shard_spans(n):
        lambdas = [c.take(k) * top for c in cursors]
        hits += int(np.count_nonzero(chain_agree(phiA, phiB, lambdas)))
    return hits


def fit_scaling_exponent(deltas, probabilities) -> float:
    """Least-squares slope of log P against log delta.

    Zero probabilities cannot be logged; they are dropped with a warning.
    """
    d = np.asarray(deltas, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    keep = p > 0
    if not keep.all():
        warnings.warn(f"dropping {int((~keep).sum())} zero estimates from the fit", stacklevel=2)
    d, p = d[keep], p[keep]
    if np.unique(d).size < 4:
        raise ValueError("need at least 4 distinct deltas")
    if d.max() / d.min() < 10.0 - 1e-9:
        raise ValueError("deltas must span at least a decade")
    slope, _ = np.polyfit(np.log(d), np.log(p), 1)
    return float(slope)


def scaling_study(m: int, deltas, n_per_delta: int, seed: int) -> tuple[float, list[tuple[float, int]]]:
    """Monte Carlo estimates at phi_A = 0, phi_B = delta; returns (slope, [(delta, hits)])."""
    rows = []
    for i, d in enumerate(deltas):
        rows.append((float(d), chain_count(m, 0.0, float(d), n_per_delta, derive_seed(seed, i))))
    slope = fit_scaling_exponent([r[0] for r in rows], [r[1] / n_per_delta for r in rows])
    return slope, rows
