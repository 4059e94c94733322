"""Nine-bit simulation for arbitrary projective measurements.

Protocol 1 is run on the azimuths, then again on the signed polar angles
(a0 * theta_A, -b0 * theta_B) with fresh hidden variables.  A final shared
flip bit from Alice randomises both marginals without touching a*b.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from swapsim.geometry import MeasurementDirection
from swapsim.protocol_one import (
    PROTOCOL1_BITS,
    HiddenVariables,
    alice_step,
    bob_step,
    referee_step,
    sample_protocol1,
)

FLIP_BITS = 1
PROTOCOL2_BITS = 2 * PROTOCOL1_BITS
FULL_BITS = PROTOCOL2_BITS + FLIP_BITS


@dataclass(frozen=True)
class RoundTranscript:
    run1: tuple[int, int, int]  # (jA, cA, cR)
    run2: tuple[int, int, int]
    flip: int
    total_bits: int = FULL_BITS

    def __post_init__(self):
        if self.total_bits != FULL_BITS:
            raise ValueError(f"a full round carries {FULL_BITS} bits, not {self.total_bits}")


@dataclass(frozen=True)
class RoundOutcome:
    a: int
    b: int
    transcript: RoundTranscript


@dataclass(frozen=True)
class RoundRandomness:
    """Everything one full round consumes, each from its own stream."""

    hv1: HiddenVariables
    hv2: HiddenVariables
    u1: float
    u2: float
    flip_u: float


def flip_bit(flip_u):
    return (np.asarray(flip_u) < 0.5).astype(np.int64)


def _run_p1_logged(phiA, phiB, hv, u):
    alice = alice_step(phiA, hv.lambdaAR)
    cr = referee_step(hv.lambdaAR, hv.lambdaRB)
    bob = bob_step(phiB, hv.lambdaRB, alice.jA, alice.cA, cr, u)
    return alice.a, bob.b, (alice.jA, alice.cA, cr)


def _protocol2(x, y, hv1, hv2, u1, u2):
    if hv1 is hv2:
        raise ValueError("the second run needs fresh hidden variables")
    a0, b0, msg1 = _run_p1_logged(x.phi, y.phi, hv1, u1)
    a, b, msg2 = _run_p1_logged(a0 * x.theta, -b0 * y.theta, hv2, u2)
    return a, b, msg1, msg2


def run_protocol2(
    x: MeasurementDirection,
    y: MeasurementDirection,
    hv1: HiddenVariables,
    hv2: HiddenVariables,
    u1: float,
    u2: float,
) -> tuple[int, int, int]:
    """Two chained Protocol 1 runs; returns (a, b, bits=8)."""
    a, b, _, _ = _protocol2(x, y, hv1, hv2, u1, u2)
    return a, b, PROTOCOL2_BITS


def run_full(x: MeasurementDirection, y: MeasurementDirection, rnd: RoundRandomness) -> RoundOutcome:
    a, b, msg1, msg2 = _protocol2(x, y, rnd.hv1, rnd.hv2, rnd.u1, rnd.u2)
    flip = int(flip_bit(rnd.flip_u))
    if flip:
        a, b = -a, -b
    return RoundOutcome(a, b, RoundTranscript(msg1, msg2, flip))


def sample_protocol2(x, y, lar1, lrb1, u1, lar2, lrb2, u2):
    """Vectorised Protocol 2; returns (a, b) arrays."""
    first = sample_protocol1(x.phi, y.phi, lar1, lrb1, u1)
    second = sample_protocol1(first.a * x.theta, -first.b * y.theta, lar2, lrb2, u2)
    return second.a, second.b


def sample_full(x, y, lar1, lrb1, u1, lar2, lrb2, u2, flip_u):
    a, b = sample_protocol2(x, y, lar1, lrb1, u1, lar2, lrb2, u2)
    sign = 1 - 2 * flip_bit(flip_u)
    return a * sign, b * sign
