"""Simpson quadrature over rectangles and triangles, with refinement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "simpson"  # "simpson" (uniform doubling) or "adaptive"
    abs_tol: float = 1e-9
    max_subdivisions: int = 1 << 12
    initial_panels: int = 8

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")
        if self.method not in ("simpson", "adaptive"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.initial_panels < 2 or self.initial_panels % 2:
            raise ValueError("initial_panels must be a positive even number")


def simpson_weights(n: int) -> np.ndarray:
    """Composite Simpson weights for n (even) panels on [0, 1]."""
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * n)


def _bound(b, x):
    return b(x) if callable(b) else np.full_like(x, float(b))


def iterated_simpson(f, a, b, lo, hi, n: int) -> float:
    """Composite Simpson with n panels per axis of the region

        a <= x <= b,  lo(x) <= y <= hi(x)

    ``lo`` and ``hi`` may be constants or callables of x; ``f(x, y)`` must
    broadcast over 2-D arrays.
    """
    if b <= a:
        return 0.0
    w = simpson_weights(n)
    x = a + (b - a) * np.linspace(0.0, 1.0, n + 1)
    ylo = _bound(lo, x)
    yhi = _bound(hi, x)
    span = yhi - ylo
    t = np.linspace(0.0, 1.0, n + 1)
    y = ylo[:, None] + span[:, None] * t[None, :]
    inner = (np.asarray(f(x[:, None], y), dtype=np.float64) * w[None, :]).sum(axis=1) * span
    return float((b - a) * (w * inner).sum())


def integrate_region(f, a, b, lo, hi, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    if cfg.method == "adaptive":
        return _adaptive_outer(f, a, b, lo, hi, cfg)
    n = cfg.initial_panels
    prev = iterated_simpson(f, a, b, lo, hi, n)
    while n < cfg.max_subdivisions:
        n *= 2
        cur = iterated_simpson(f, a, b, lo, hi, n)
        if abs(cur - prev) < cfg.abs_tol:
            return cur
        prev = cur
    raise QuadratureError(f"no convergence to {cfg.abs_tol} within {n} panels")


def _inner(f, x, lo, hi, cfg):
    """Converged inner integral at a single outer abscissa x."""
    xa = np.array([x])
    ylo = float(_bound(lo, xa)[0])
    yhi = float(_bound(hi, xa)[0])
    if yhi <= ylo:
        return 0.0

    def g(y):
        return np.asarray(f(np.full_like(y, x), y), dtype=np.float64)

    return _adaptive_1d(g, ylo, yhi, cfg.abs_tol / 4.0, cfg)


def _adaptive_outer(f, a, b, lo, hi, cfg):
    if b <= a:
        return 0.0

    def g(xs):
        return np.array([_inner(f, float(x), lo, hi, cfg) for x in np.atleast_1d(xs)])

    return _adaptive_1d(g, a, b, cfg.abs_tol, cfg)


def _adaptive_1d(g, a, b, tol, cfg):
    """Classic recursive adaptive Simpson with Richardson correction."""
    budget = [cfg.max_subdivisions]

    def simpson(fa, fm, fb, h):
        return h * (fa + 4.0 * fm + fb) / 6.0

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = g(np.array([lm, rm]))
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        budget[0] -= 1
        if budget[0] < 0 or depth > 50:
            raise QuadratureError("adaptive Simpson exceeded its subdivision budget")
        if abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2.0, depth + 1
        )

    fa, fm, fb = g(np.array([a, 0.5 * (a + b), b]))
    return float(recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 0))
