"""End-to-end acceptance checks at their full sample sizes.

Each test appends one PASS/FAIL line that is printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

import conftest
from swapsim.cli import main
from swapsim.harness import (
    CHI2_LEVEL,
    Z_PASS,
    EstimatorResult,
    agrees_with,
    chi_square_pvalue,
    chsh,
    full_counts,
    marginals,
    pair_study,
    random_pairs,
)
from swapsim.multistage import chain_agreement_closed_form, scaling_study
from swapsim.oracle import (
    integral_agreement,
    symmetry_residuals,
    verify_table_bounds,
    warmup_agreement,
    warmup_weighted_agreement,
)
from swapsim.geometry import singlet_correlation
from swapsim.runner import run_session
from swapsim.warmup import warmup_count

pytestmark = pytest.mark.slow

SEED = 20120831
_state = {}


def report(number, title, ok, detail, started):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail} ({time.perf_counter() - started:.1f} s)"
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_01_table_validity():
    t0 = time.perf_counter()
    rep = verify_table_bounds(100_000)
    lo = min(r.minimum for r in rep.rows)
    hi = max(r.maximum for r in rep.rows)
    report(1, "table validity", rep.ok and len(rep.rows) == 32,
           f"32 entries span [{lo:.3g}, {hi:.6f}]", t0)


def test_02_integral_oracle():
    t0 = time.perf_counter()
    pts = 20
    dev = sym = 0.0
    branches = set()
    for i in range(pts):
        for j in range(pts):
            pa = (i + 0.5) * (math.pi / 4) / pts
            pb = (j + 0.5) * math.pi / pts
            branches.add(int(4 * pb / math.pi))
            dev = max(dev, abs(integral_agreement(pa, pb) - (1 - math.cos(pa - pb)) / 2))
            sym = max(sym, max(abs(v) for v in symmetry_residuals(pa, pb).values()))
    ok = dev <= 1e-6 and sym <= 1e-6 and branches == {0, 1, 2, 3}
    report(2, "integral oracle", ok, f"max deviation {dev:.2e}, max symmetry residual {sym:.2e}", t0)


def test_03_protocol1_statistics():
    t0 = time.perf_counter()
    rows = pair_study(random_pairs(50, SEED, equatorial=True), 1_000_000, SEED, mode="p1")
    z = np.array([r.z for r in rows])
    p = chi_square_pvalue(z)
    ok = all(r.passed for r in rows) and p >= CHI2_LEVEL
    report(3, "protocol 1 statistics", ok, f"max |z| {np.abs(z).max():.2f}, chi2 p {p:.3f}", t0)


def test_04_full_sphere():
    t0 = time.perf_counter()
    n = 1_000_000
    worst = 0.0
    ok = True
    pooled = [0, 0, 0]
    for k, (x, y) in enumerate(random_pairs(50, SEED + 1)):
        c = full_counts(x, y, n, SEED + k)
        res = EstimatorResult.correlation(c.product_sum, c.n)
        target = singlet_correlation(x, y)
        worst = max(worst, abs(res.z(target)))
        ok = ok and agrees_with(res, target)
        pooled[0] += c.n
        pooled[1] += c.a_plus
        pooled[2] += c.b_plus
    _state["pooled"] = pooled
    report(4, "full sphere correlation", ok, f"max |z| {worst:.2f} over 50 pairs", t0)


def test_05_marginals():
    t0 = time.perf_counter()
    if "pooled" not in _state:
        pytest.skip("needs the rounds from the full sphere check")
    n, a_plus, b_plus = _state["pooled"]
    ra = EstimatorResult.probability(a_plus, n)
    rb = EstimatorResult.probability(b_plus, n)
    ok = abs(ra.z(0.5)) <= Z_PASS and abs(rb.z(0.5)) <= Z_PASS
    report(5, "marginals", ok, f"P(a=1) z {ra.z(0.5):+.2f}, P(b=1) z {rb.z(0.5):+.2f} over {n} rounds", t0)


def test_06_bit_budget():
    t0 = time.perf_counter()
    n = 10_000
    ok = True
    parts = []
    for mode, bits in (("full", 9), ("protocol1", 4)):
        settings = random_pairs(n, SEED, equatorial=(mode == "protocol1"))
        for transport in ("inprocess", "tcp"):
            res = run_session(mode, settings, n, SEED, transport=transport, check=False)
            bad = res.audit.bad_rounds(n, bits)
            ok = ok and not bad and res.audit.session_total == n * bits
            parts.append(f"{mode}/{transport} {res.audit.session_total // n} bits")
    elapsed = time.perf_counter() - t0
    report(6, "bit budget", ok and elapsed < 30, ", ".join(parts), t0)


def test_07_chsh():
    t0 = time.perf_counter()
    res = chsh(10_000_000, SEED)
    ok = abs(abs(res.S) - res.target) <= 0.01
    report(7, "CHSH", ok, f"S = {res.S:.5f} +- {res.std_err:.5f}", t0)


def test_08_warmup():
    t0 = time.perf_counter()
    m, n = 4, 10_000_000
    ok = True
    worst = 0.0
    for i, d in enumerate(np.linspace(math.pi / 20, math.pi / 4, 5)):
        for weighted in (False, True):
            target = (warmup_weighted_agreement(m, 0.0, d).closed_form if weighted
                      else warmup_agreement(m, 0.0, d))
            hits = warmup_count(m, 0.0, float(d), n, SEED + 2 * i + weighted, weighted=weighted)
            res = EstimatorResult.probability(hits, n)
            worst = max(worst, abs(res.z(target)))
            ok = ok and agrees_with(res, target)
    report(8, "warm-up formulas", ok, f"max |z| {worst:.2f} over 10 estimates", t0)


def test_09_multistage():
    t0 = time.perf_counter()
    m, n = 4, 10_000_000
    deltas = np.geomspace(math.pi / (10 * m), math.pi / m, 5)
    slope, rows = scaling_study(m, deltas, n, SEED)
    zs = [EstimatorResult.probability(h, n).z(chain_agreement_closed_form(m, 0.0, d)) for d, h in rows]
    ok = abs(slope - 3.0) <= 0.1 and all(
        agrees_with(EstimatorResult.probability(h, n), chain_agreement_closed_form(m, 0.0, d))
        for d, h in rows
    )
    report(9, "multistage cubic scaling", ok, f"slope {slope:.4f}, max |z| {max(map(abs, zs)):.2f}", t0)


def _cli_bytes(tmp_path, name, argv):
    path = tmp_path / name
    assert main([*argv, "--out", str(path)]) == 0
    return path.read_bytes()


def test_10_determinism(tmp_path):
    t0 = time.perf_counter()
    runs = [
        ["simulate", "--mode", "p1", "--pairs", "50", "--n", "1000000", "--seed", "7"],
        ["multistage", "--n", "10000000", "--seed", "7"],
        ["bits-audit", "--rounds", "2000", "--seed", "7"],
        ["verify-table", "--grid", "100000", "--format", "json"],
    ]
    same = [_cli_bytes(tmp_path, f"{i}a", a) == _cli_bytes(tmp_path, f"{i}b", a) for i, a in enumerate(runs)]
    report(10, "determinism", all(same), f"{sum(same)}/{len(same)} reruns byte-identical", t0)
