"""Four-bit simulation of equatorial measurements.

Alice sends her sector index j_A (2 bits) and c_A (1 bit) to Bob, the Referee
sends c_R (1 bit), and Bob flips a biased coin drawn from the weight table.

Angles are reduced in units of pi/4 (see ``geometry.sector_units``) so that
Alice's and Bob's reductions of the same setting agree bit for bit.  The
sign convention is the half-open one: ``a = +1`` iff phi_A mod 2*pi lies in
[0, pi).  This gives sign(0) = +1 at phi = 0, and at phi = pi it gives the
value the pi-antisymmetry of the protocol requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from swapsim.geometry import sector_units
from swapsim.table import flat_index, weight, weight_array

QUARTER_PI = math.pi / 4.0
PROTOCOL1_BITS = 4


@dataclass(frozen=True)
class HiddenVariables:
    """Shared randomness of one run: lambda_AR (Alice-Referee), lambda_RB (Referee-Bob)."""

    lambdaAR: float
    lambdaRB: float

    def __post_init__(self):
        for name in ("lambdaAR", "lambdaRB"):
            v = getattr(self, name)
            if not 0.0 <= v <= QUARTER_PI:
                raise ValueError(f"{name}={v} outside [0, pi/4]")

    @classmethod
    def from_uniforms(cls, u_ar: float, u_rb: float) -> HiddenVariables:
        return cls(QUARTER_PI * u_ar, QUARTER_PI * u_rb)


@dataclass(frozen=True)
class AliceDecision:
    a: int
    jA: int
    cA: int
    phiA_prime: float


@dataclass(frozen=True)
class BobDecision:
    beta: int
    phiB_prime: float
    jB: int
    cB: int
    b: int


@dataclass
class Protocol1Batch:
    """Per-round outputs and transmitted values of a vectorised run."""

    a: np.ndarray
    b: np.ndarray
    jA: np.ndarray
    cA: np.ndarray
    cR: np.ndarray


# -- vectorised kernels -------------------------------------------------------
# Every scalar step below delegates to these so that the message-passing
# runner and the batch sampler execute identical floating-point operations.


def alice_kernel(phi_a, lambda_ar):
    u = sector_units(phi_a)
    ja = np.floor(u).astype(np.int64) % 4
    s = u - ja
    a = np.where(s < 4.0, 1, -1)
    frac = np.where(s >= 4.0, s - 4.0, s)
    phi_prime = frac * QUARTER_PI
    ca = (phi_prime < lambda_ar).astype(np.int64)
    return a, ja, ca, phi_prime


def referee_kernel(lambda_ar, lambda_rb):
    return (np.asarray(lambda_ar) < np.asarray(lambda_rb)).astype(np.int64)


def bob_kernel(phi_b, lambda_rb, ja, ca, cr, u):
    s = np.mod(sector_units(phi_b) - ja, 8.0)
    s = np.where(s >= 8.0, 0.0, s)
    beta = np.where(s < 4.0, 1, -1)
    t = np.where(s >= 4.0, s - 4.0, s)
    jb = np.minimum(np.floor(t).astype(np.int64), 3)
    frac = t - jb
    phi_prime = t * QUARTER_PI
    cb = (lambda_rb < frac * QUARTER_PI).astype(np.int64)
    gamma = phi_prime - lambda_rb
    p = weight_array(flat_index(jb, ca, cr, cb), gamma)
    b = np.where(u < p, beta, -beta)
    return beta, phi_prime, jb, cb, b


def sample_protocol1(phi_a, phi_b, lambda_ar, lambda_rb, u) -> Protocol1Batch:
    """Run Protocol 1 on arrays of hidden variables (angles may broadcast)."""
    lambda_ar = np.asarray(lambda_ar, dtype=np.float64)
    lambda_rb = np.asarray(lambda_rb, dtype=np.float64)
    a, ja, ca, _ = alice_kernel(phi_a, lambda_ar)
    cr = referee_kernel(lambda_ar, lambda_rb)
    _, _, _, _, b = bob_kernel(phi_b, lambda_rb, ja, ca, cr, u)
    shape = np.broadcast(a, b).shape
    return Protocol1Batch(
        a=np.broadcast_to(a, shape), b=b, jA=np.broadcast_to(ja, shape), cA=ca, cR=cr
    )


# -- single-round steps -------------------------------------------------------


def _one(x):
    return np.asarray([x], dtype=np.float64)


def alice_step(phiA: float, lambdaAR: float) -> AliceDecision:
    """Alice's output and message; depends on (phi_A, lambda_AR) only."""
    if not 0.0 <= lambdaAR <= QUARTER_PI:
        raise ValueError(f"lambdaAR={lambdaAR} outside [0, pi/4]")
    a, ja, ca, phi_prime = alice_kernel(_one(phiA), _one(lambdaAR))
    return AliceDecision(int(a[0]), int(ja[0]), int(ca[0]), float(phi_prime[0]))


def referee_step(lambdaAR: float, lambdaRB: float) -> int:
    """c_R = [lambda_AR < lambda_RB], strict."""
    return int(referee_kernel(lambdaAR, lambdaRB))


def bob_step(
    phiB: float, lambdaRB: float, jA: int, cA: int, cR: int, u: float
) -> BobDecision:
    """Bob's decision after receiving (j_A, c_A) and c_R.

    ``u`` is Bob's private uniform draw; he outputs beta iff u < weight.
    """
    if not 0.0 <= lambdaRB <= QUARTER_PI:
        raise ValueError(f"lambdaRB={lambdaRB} outside [0, pi/4]")
    if jA not in (0, 1, 2, 3) or cA not in (0, 1) or cR not in (0, 1):
        raise ValueError(f"malformed message j_A={jA}, c_A={cA}, c_R={cR}")
    beta, phi_prime, jb, cb, b = bob_kernel(
        _one(phiB), _one(lambdaRB), np.int64(jA), np.int64(cA), np.int64(cR), _one(u)
    )
    return BobDecision(int(beta[0]), float(phi_prime[0]), int(jb[0]), int(cb[0]), int(b[0]))


def bob_weight(decision: BobDecision, lambdaRB: float, cA: int, cR: int) -> float:
    """Acceptance probability Bob used for ``decision`` (scalar, checked)."""
    return weight(decision.jB, cA, cR, decision.cB, decision.phiB_prime - lambdaRB)


def run_protocol1(
    phiA: float, phiB: float, hv: HiddenVariables, u: float
) -> tuple[int, int, int]:
    """One round; returns (a, b, bits) with bits always 4."""
    alice = alice_step(phiA, hv.lambdaAR)
    cr = referee_step(hv.lambdaAR, hv.lambdaRB)
    bob = bob_step(phiB, hv.lambdaRB, alice.jA, alice.cA, cr, u)
    bits = 2 + 1 + 1
    assert bits == PROTOCOL1_BITS
    return alice.a, bob.b, bits
