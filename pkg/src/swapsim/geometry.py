"""Angles, Bloch-sphere directions and the singlet targets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi
QUARTER_PI = math.pi / 4.0
UNIT_TOL = 1e-9


def normalize_angle(phi):
    """Map any real angle (or array of angles) to [0, 2*pi)."""
    out = np.mod(phi, TWO_PI)
    # np.mod can round a tiny negative input up to exactly 2*pi
    out = np.where(out >= TWO_PI, 0.0, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


def sector_units(phi):
    """Angle expressed in units of pi/4, reduced to [0, 8).

    All sector arithmetic in the protocol happens in these units: subtracting
    an integer sector offset from a value in [0, 8) is exact in binary
    floating point, so two parties reducing the same angle by the same offset
    always land on bit-identical results.
    """
    u = np.mod(np.asarray(phi, dtype=np.float64) * (4.0 / math.pi), 8.0)
    return np.where(u >= 8.0, 0.0, u)


def sector_index(phi) -> int:
    """Index floor((4/pi) (phi mod pi)) of the pi/4 sector holding ``phi``."""
    u = sector_units(phi)
    return int(np.floor(u)) % 4


@dataclass(frozen=True)
class MeasurementDirection:
    """Unit vector on the Bloch sphere.

    ``theta`` is the polar angle in [0, pi], ``phi`` the azimuth in [0, 2*pi).
    The Cartesian form is derived and renormalised on construction.
    """

    theta: float
    phi: float
    cartesian: tuple[float, float, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        theta = float(self.theta)
        if not (-UNIT_TOL <= theta <= math.pi + UNIT_TOL):
            raise ValueError(f"polar angle {theta} outside [0, pi]")
        theta = min(max(theta, 0.0), math.pi)
        phi = normalize_angle(float(self.phi))
        v = np.array(
            [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
        )
        v /= np.linalg.norm(v)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "cartesian", (float(v[0]), float(v[1]), float(v[2])))

    @classmethod
    def from_cartesian(cls, x: float, y: float, z: float) -> MeasurementDirection:
        norm = math.sqrt(x * x + y * y + z * z)
        if abs(norm - 1.0) > UNIT_TOL:
            raise ValueError(f"direction has norm {norm}, expected 1")
        x, y, z = x / norm, y / norm, z / norm
        theta = math.acos(min(max(z, -1.0), 1.0))
        phi = math.atan2(y, x)
        return cls(theta, phi)

    @classmethod
    def equatorial(cls, phi: float) -> MeasurementDirection:
        return cls(math.pi / 2.0, phi)

    @classmethod
    def random(cls, rng: np.random.Generator) -> MeasurementDirection:
        """Haar-uniform direction."""
        z = rng.uniform(-1.0, 1.0)
        phi = rng.uniform(0.0, TWO_PI)
        return cls(math.acos(z), phi)

    def as_array(self) -> np.ndarray:
        return np.array(self.cartesian)


def _as_unit_vector(d) -> np.ndarray:
    v = d.as_array() if isinstance(d, MeasurementDirection) else np.asarray(d, dtype=float)
    if v.shape != (3,):
        raise ValueError("direction must have three components")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"direction has norm {norm}, expected 1")
    return v


def singlet_correlation(x, y) -> float:
    """E(x, y) = -x.y for the singlet state."""
    return -float(np.dot(_as_unit_vector(x), _as_unit_vector(y)))


def agreement_probability(x, y) -> float:
    """P(a = b | x, y) = (1 - x.y) / 2."""
    return (1.0 + singlet_correlation(x, y)) / 2.0


def equatorial_agreement(phi_a, phi_b):
    """P(a = b) for equatorial settings: sin^2((phi_a - phi_b) / 2)."""
    delta = normalize_angle(phi_a) - normalize_angle(phi_b)
    return np.sin(delta / 2.0) ** 2 if np.ndim(delta) else math.sin(delta / 2.0) ** 2
