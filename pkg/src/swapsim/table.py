"""Bob's acceptance probabilities for the 4-bit equatorial protocol.

Each entry maps gamma = phi_B' - lambda_RB to the probability that Bob outputs
b = beta, given his sector j_B and the three bits (c_A, c_R, c_B).  The entries
are closed-form trigonometric expressions; nothing is tabulated.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass

import numpy as np

PI = math.pi
SQRT2 = math.sqrt(2.0)
C32 = PI**2 / 32.0
C64 = PI**2 / 64.0

DOMAIN_SLACK = 1e-9
CLAMP_TOL = 1e-12

# closed gamma-interval of each j_B column
INTERVALS: dict[int, tuple[float, float]] = {
    0: (-PI / 4, PI / 4),
    1: (0.0, PI / 2),
    2: (PI / 4, 3 * PI / 4),
    3: (PI / 2, PI),
}


def _zero(g):
    return np.zeros_like(np.asarray(g, dtype=np.float64))


def _one(g):
    return np.ones_like(np.asarray(g, dtype=np.float64))


# keyed by (j_B, c_A, c_R, c_B)
ENTRIES: dict[tuple[int, int, int, int], Callable] = {
    # j_B = 0
    (0, 0, 0, 0): lambda g: C32 * np.cos(g),
    (0, 0, 0, 1): _zero,
    (0, 0, 1, 0): _zero,
    (0, 0, 1, 1): _zero,
    (0, 1, 0, 0): _zero,
    (0, 1, 0, 1): _zero,
    (0, 1, 1, 0): _zero,
    (0, 1, 1, 1): lambda g: C32 * np.cos(g),
    # j_B = 1
    (1, 0, 0, 0): _zero,
    (1, 0, 0, 1): _zero,
    (1, 0, 1, 0): _zero,
    (1, 0, 1, 1): lambda g: C32 * np.cos(g - PI / 4),
    (1, 1, 0, 0): _zero,
    (1, 1, 0, 1): lambda g: C32 * np.cos(g - PI / 4),
    (1, 1, 1, 0): lambda g: C32 * np.cos(g),
    (1, 1, 1, 1): lambda g: C32 * (np.cos(g) + 2 * np.cos(g - PI / 4)),
    # j_B = 2
    (2, 0, 0, 0): lambda g: 0.5 + C64 * (1 - (2 + SQRT2) * np.sin(g)),
    (2, 0, 0, 1): lambda g: 0.5 + C64 * (1 - SQRT2 * np.sin(g)),
    (2, 0, 1, 0): lambda g: 0.5 - C64 * (1 + SQRT2 * np.sin(g + PI / 4)),
    (2, 0, 1, 1): lambda g: 0.5 - C64 * (1 - SQRT2 * np.sin(g - PI / 4)),
    (2, 1, 0, 0): lambda g: 0.5 + C64 * (1 - SQRT2 * np.sin(g + PI / 4)),
    (2, 1, 0, 1): lambda g: 0.5 + C64 * (1 + SQRT2 * np.sin(g - PI / 4)),
    (2, 1, 1, 0): lambda g: 0.5 - C64 * (1 - SQRT2 * np.sin(g)),
    (2, 1, 1, 1): lambda g: 0.5 - C64 * (1 - (2 + SQRT2) * np.sin(g)),
    # j_B = 3
    (3, 0, 0, 0): lambda g: 1 + C32 * (np.cos(g) + 2 * np.cos(g + PI / 4)),
    (3, 0, 0, 1): lambda g: 1 + C32 * np.cos(g),
    (3, 0, 1, 0): lambda g: 1 + C32 * np.cos(g + PI / 4),
    (3, 0, 1, 1): _one,
    (3, 1, 0, 0): lambda g: 1 + C32 * np.cos(g + PI / 4),
    (3, 1, 0, 1): _one,
    (3, 1, 1, 0): _one,
    (3, 1, 1, 1): _one,
}


class WeightDomainError(ValueError):
    """gamma lies outside the column interval of the requested entry."""


def table_key(jb: int, ca: int, cr: int, cb: int) -> tuple[int, int, int, int]:
    key = (int(jb), int(ca), int(cr), int(cb))
    if key not in ENTRIES:
        raise IndexError(f"no table entry for j_B={jb}, c_A c_R c_B={ca}{cr}{cb}")
    return key


def flat_index(jb, ca, cr, cb):
    """Pack (j_B, c_A, c_R, c_B) into 0..31; works elementwise on arrays."""
    return 8 * jb + 4 * ca + 2 * cr + cb


def key_from_index(idx: int) -> tuple[int, int, int, int]:
    return (idx >> 3, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1)


def raw_entry(jb: int, ca: int, cr: int, cb: int) -> Callable:
    """Unchecked closed form; used by the quadrature oracle."""
    return ENTRIES[table_key(jb, ca, cr, cb)]


def _check_and_clamp(value, key):
    lo_bad = value < -CLAMP_TOL
    hi_bad = value > 1.0 + CLAMP_TOL
    if np.any(lo_bad) or np.any(hi_bad):
        raise ValueError(f"table entry {key} left [0, 1]: {value}")
    return np.clip(value, 0.0, 1.0)


def weight(jb: int, ca: int, cr: int, cb: int, gamma: float) -> float:
    """Probability that Bob outputs b = beta.

    Raises ``IndexError`` for an unknown entry and ``WeightDomainError`` when
    ``gamma`` is outside the column interval by more than 1e-9.
    """
    key = table_key(jb, ca, cr, cb)
    lo, hi = INTERVALS[key[0]]
    if not (lo - DOMAIN_SLACK <= gamma <= hi + DOMAIN_SLACK):
        raise WeightDomainError(f"gamma={gamma} outside [{lo}, {hi}] for j_B={key[0]}")
    return float(_check_and_clamp(ENTRIES[key](gamma), key))


def weight_array(index: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Vectorised ``weight`` for packed indices (see ``flat_index``)."""
    index = np.asarray(index)
    gamma = np.asarray(gamma, dtype=np.float64)
    out = np.empty(gamma.shape, dtype=np.float64)
    for idx in np.unique(index):
        mask = index == idx
        key = key_from_index(int(idx))
        g = gamma[mask]
        lo, hi = INTERVALS[key[0]]
        if np.any(g < lo - DOMAIN_SLACK) or np.any(g > hi + DOMAIN_SLACK):
            raise WeightDomainError(f"gamma outside [{lo}, {hi}] for j_B={key[0]}")
        out[mask] = _check_and_clamp(ENTRIES[key](g), key)
    return out


@dataclass(frozen=True)
class EntryBounds:
    key: tuple[int, int, int, int]
    interval: tuple[float, float]
    minimum: float
    maximum: float

    @property
    def ok(self) -> bool:
        return self.minimum >= -CLAMP_TOL and self.maximum <= 1.0 + CLAMP_TOL

    @property
    def label(self) -> str:
        jb, ca, cr, cb = self.key
        return f"jB={jb} {ca}{cr}{cb}"


class WeightTable:
    """The 32 entries, iterable in (j_B, c_A, c_R, c_B) order."""

    def __len__(self) -> int:
        return len(ENTRIES)

    def __iter__(self) -> Iterator[tuple[int, int, int, int]]:
        return iter(sorted(ENTRIES))

    def __call__(self, jb, ca, cr, cb, gamma):
        return weight(jb, ca, cr, cb, gamma)

    @staticmethod
    def interval(jb: int) -> tuple[float, float]:
        return INTERVALS[jb]

    def scan(self, grid_points: int) -> list[EntryBounds]:
        """Min/max of every raw entry over an equispaced grid of its interval."""
        if grid_points < 2:
            raise ValueError("grid_points must be at least 2")
        grids = {jb: np.linspace(lo, hi, grid_points) for jb, (lo, hi) in INTERVALS.items()}
        report = []
        for key in self:
            values = np.broadcast_to(ENTRIES[key](grids[key[0]]), (grid_points,))
            report.append(
                EntryBounds(key, INTERVALS[key[0]], float(values.min()), float(values.max()))
            )
        return report
