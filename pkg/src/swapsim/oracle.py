"""Sampling-free certification of the protocols.

The agreement probability of the 4-bit protocol on the fundamental domain
phi_A in [0, pi/4), phi_B in [0, pi) is a sum of nine double integrals of
table entries over regions of the (lambda_AR, lambda_RB) square.  The two
cases (phi_A below / above delta = phi_B - j_B pi/4) are written out term
by term, so a wrong entry shows up as a wrong term.  Everything here uses
the raw closed forms and never draws a random number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from swapsim.quadrature import QuadratureConfig, integrate_region
from swapsim.table import ENTRIES, WeightTable

PI = math.pi
Q = PI / 4.0
PREFACTOR = 16.0 / PI**2
SYMMETRY_SHIFTS = tuple(range(1, 8))


class OracleDomainError(ValueError):
    pass


class WeightViolation(ValueError):
    """A warm-up weight function leaves [0, 1]."""


# Region bounds use symbols: "0", "A" (phi_A), "D" (delta), "Q" (pi/4) and
# "x" (the outer variable lambda_AR).  Each term: (outer_lo, outer_hi,
# inner_lo, inner_hi, (c_A, c_R, c_B)).
TERMS_LESS = (
    ("0", "A", "0", "x", (0, 0, 1)),
    ("0", "A", "x", "D", (0, 1, 1)),
    ("0", "A", "D", "Q", (0, 1, 0)),
    ("A", "D", "0", "x", (1, 0, 1)),
    ("A", "D", "x", "D", (1, 1, 1)),
    ("A", "D", "D", "Q", (1, 1, 0)),
    ("D", "Q", "0", "D", (1, 0, 1)),
    ("D", "Q", "D", "x", (1, 0, 0)),
    ("D", "Q", "x", "Q", (1, 1, 0)),
)

TERMS_GEQ = (
    ("0", "D", "0", "x", (0, 0, 1)),
    ("0", "D", "x", "D", (0, 1, 1)),
    ("0", "D", "D", "Q", (0, 1, 0)),
    ("D", "A", "0", "D", (0, 0, 1)),
    ("D", "A", "D", "x", (0, 0, 0)),
    ("D", "A", "x", "Q", (0, 1, 0)),
    ("A", "Q", "0", "D", (1, 0, 1)),
    ("A", "Q", "D", "x", (1, 0, 0)),
    ("A", "Q", "x", "Q", (1, 1, 0)),
)


@dataclass
class IntegralBreakdown:
    value: float
    terms: list[tuple[tuple[int, int, int], float]] = field(default_factory=list)


def _resolve(symbol, phi_a, delta):
    if symbol == "x":
        return lambda x: x
    return {"0": 0.0, "A": phi_a, "D": delta, "Q": Q}[symbol]


def _column(phi_b):
    jb = min(int(math.floor(4.0 * phi_b / PI)), 3)
    return jb, phi_b - jb * Q


def _check_fundamental(phi_a, phi_b):
    if not (0.0 <= phi_a < Q):
        raise OracleDomainError(f"phi_A={phi_a} outside [0, pi/4)")
    if not (0.0 <= phi_b < PI):
        raise OracleDomainError(f"phi_B={phi_b} outside [0, pi)")


def _sum_terms(terms, phi_a, phi_b, cfg) -> IntegralBreakdown:
    jb, delta = _column(phi_b)
    out = IntegralBreakdown(0.0)
    for olo, ohi, ilo, ihi, bits in terms:
        entry = ENTRIES[(jb, *bits)]

        def integrand(lar, lrb, entry=entry):
            return np.broadcast_to(entry(phi_b - lrb), np.broadcast(lar, lrb).shape)

        a = _resolve(olo, phi_a, delta)
        b = _resolve(ohi, phi_a, delta)
        val = PREFACTOR * integrate_region(
            integrand, a, b, _resolve(ilo, phi_a, delta), _resolve(ihi, phi_a, delta), cfg
        )
        out.terms.append((bits, val))
    # fixed summation order
    out.value = math.fsum(v for _, v in out.terms)
    return out


def integral_agreement_less(
    phiA: float, phiB: float, cfg: QuadratureConfig = QuadratureConfig(), breakdown: bool = False
):
    """P(a = b) when phi_A < phi_B - j_B pi/4 (fundamental domain)."""
    _check_fundamental(phiA, phiB)
    _, delta = _column(phiB)
    if not phiA < delta:
        raise OracleDomainError(f"need phi_A < {delta}, got {phiA}")
    res = _sum_terms(TERMS_LESS, phiA, phiB, cfg)
    return res if breakdown else res.value


def integral_agreement_geq(
    phiA: float, phiB: float, cfg: QuadratureConfig = QuadratureConfig(), breakdown: bool = False
):
    """P(a = b) when phi_A >= phi_B - j_B pi/4 (fundamental domain)."""
    _check_fundamental(phiA, phiB)
    _, delta = _column(phiB)
    if not phiA >= delta:
        raise OracleDomainError(f"need phi_A >= {delta}, got {phiA}")
    res = _sum_terms(TERMS_GEQ, phiA, phiB, cfg)
    return res if breakdown else res.value


def integral_agreement(phiA: float, phiB: float, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Dispatch to the right case on the fundamental domain."""
    _check_fundamental(phiA, phiB)
    _, delta = _column(phiB)
    if phiA < delta:
        return integral_agreement_less(phiA, phiB, cfg)
    return integral_agreement_geq(phiA, phiB, cfg)


def oracle_agreement(phiA: float, phiB: float, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """P(a = b) for arbitrary equatorial angles via the fundamental domain.

    Alice's output is +1 on [0, pi); both angles are shifted back by Alice's
    sector j_A pi/4 and folded mod pi, each fold flipping the sign.
    """
    pa = math.fmod(phiA, 2 * PI) % (2 * PI)
    pb = math.fmod(phiB, 2 * PI) % (2 * PI)
    a = 1 if pa < PI else -1
    ja = min(int(math.floor((pa % PI) / Q)), 3)
    pa_red = (pa - ja * Q) % PI
    if pa_red >= Q:  # rounding at a sector edge
        pa_red = 0.0
    sb = (pb - ja * Q) % (2 * PI)
    beta = 1 if sb < PI else -1
    pb_red = sb % PI
    p_beta = integral_agreement(pa_red, pb_red, cfg)
    return p_beta if a == beta else 1.0 - p_beta


def symmetry_residuals(phiA: float, phiB: float, cfg: QuadratureConfig = QuadratureConfig()) -> dict:
    """Deviations from the four symmetry identities of the 4-bit protocol."""
    base = oracle_agreement(phiA, phiB, cfg)
    res = {
        "flip_bob": base - (1.0 - oracle_agreement(phiA, phiB + PI, cfg)),
        "flip_alice": base - (1.0 - oracle_agreement(phiA + PI, phiB, cfg)),
        "flip_both": base - oracle_agreement(phiA + PI, phiB + PI, cfg),
    }
    for j in SYMMETRY_SHIFTS:
        res[f"shift_{j}"] = base - oracle_agreement(phiA + j * Q, phiB + j * Q, cfg)
    return res


# -- warm-up protocol ------------------------------------------------------


def _check_warmup(m, phiA, phiB):
    if m < 1:
        raise ValueError("m must be positive")
    top = PI / m
    for name, v in (("phi_A", phiA), ("phi_B", phiB)):
        if not 0.0 <= v <= top:
            raise OracleDomainError(f"{name}={v} outside [0, pi/{m}]")


def warmup_agreement(m: int, phiA: float, phiB: float) -> float:
    """Naive protocol: P(c_A = c_R = c_B) = (m^2 / 2 pi^2) (phi_A - phi_B)^2."""
    _check_warmup(m, phiA, phiB)
    return m * m / (2.0 * PI**2) * (phiA - phiB) ** 2


def warmup_weight(m: int):
    coeff = PI**2 / (2.0 * m * m)
    return lambda g: coeff * np.cos(g)


def check_warmup_weight(m: int, grid_points: int = 10_001) -> tuple[float, float]:
    """Range of the warm-up weight over every reachable gamma in [-pi/m, pi/m]."""
    g = np.linspace(-PI / m, PI / m, grid_points)
    v = warmup_weight(m)(g)
    lo, hi = float(v.min()), float(v.max())
    if lo < -1e-12 or hi > 1.0 + 1e-12:
        raise WeightViolation(f"m={m}: warm-up weight spans [{lo:.6f}, {hi:.6f}], outside [0, 1]")
    return lo, hi


@dataclass(frozen=True)
class WarmupResult:
    integral: float
    closed_form: float

    @property
    def discrepancy(self) -> float:
        return abs(self.integral - self.closed_form)


def warmup_weighted_agreement(
    m: int, phiA: float, phiB: float, cfg: QuadratureConfig = QuadratureConfig()
) -> WarmupResult:
    """Weighted warm-up: integral of (pi^2/2m^2) cos(phi_B - lambda_RB) vs sin^2(delta/2)."""
    _check_warmup(m, phiA, phiB)
    check_warmup_weight(m)
    w = warmup_weight(m)

    def f(lar, lrb):
        return np.broadcast_to(w(phiB - lrb), np.broadcast(lar, lrb).shape)

    if phiA < phiB:
        # phi_A < lambda_AR < lambda_RB < phi_B: all brackets 1
        val = integrate_region(f, phiA, phiB, lambda x: x, phiB, cfg)
    else:
        # phi_B <= lambda_RB <= lambda_AR <= phi_A: all brackets 0
        val = integrate_region(f, phiB, phiA, phiB, lambda x: x, cfg)
    return WarmupResult(m * m / PI**2 * val, math.sin((phiA - phiB) / 2.0) ** 2)


# -- protocol 2 composition --------------------------------------------------


def compose_protocol2(p_eq: float, thetaA: float, thetaB: float) -> float:
    """P(a = b) after the polar run, given P(a0 = b0) from the azimuthal run."""
    if not 0.0 <= p_eq <= 1.0:
        raise ValueError(f"p_eq={p_eq} is not a probability")
    return p_eq * (1.0 - math.cos(thetaA + thetaB)) / 2.0 + (1.0 - p_eq) * (
        1.0 - math.cos(thetaA - thetaB)
    ) / 2.0


# -- table bounds ------------------------------------------------------------


@dataclass
class TableReport:
    rows: list

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r.ok]


def verify_table_bounds(grid_points: int = 100_000) -> TableReport:
    return TableReport(WeightTable().scan(grid_points))
