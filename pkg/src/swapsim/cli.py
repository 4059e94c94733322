"""Command-line entry point.

Every subcommand writes a table (CSV or JSON) whose header echoes the full
configuration, and exits 0 when its checks pass, 1 when any fails and 2 on
bad usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from swapsim.harness import (
    CHI2_LEVEL,
    CHSH_X,
    CHSH_Y,
    Z_PASS,
    ExperimentConfig,
    chi_square_pvalue,
    chsh,
    pair_study,
    random_pairs,
)
from swapsim.multistage import chain_agreement_closed_form, scaling_study
from swapsim.oracle import integral_agreement, symmetry_residuals, verify_table_bounds
from swapsim.runner import TcpConfig, run_session
from swapsim.runner.parties import EXPECTED_BITS, runs_for
from swapsim.streams import default_seed

ORACLE_TOL = 1e-6
CHSH_TOL = 0.01
SLOPE_TOL = 0.1


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_table(stream, fmt: str, config: dict, columns, rows, summary: dict) -> None:
    if fmt == "json":
        payload = {
            "config": config,
            "rows": [dict(zip(columns, r)) for r in rows],
            "summary": summary,
        }
        stream.write(json.dumps(payload, indent=2, sort_keys=True, default=float))
        stream.write("\n")
        return
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    buf.write(f"# summary: {json.dumps(summary, sort_keys=True, default=float)}\n")
    stream.write(buf.getvalue())


def _config(args, **extra) -> dict:
    cfg = ExperimentConfig(
        seed=args.seed, n_rounds=args.n, mode=args.mode, pairs=args.pairs,
        fmt=args.format, transport=args.transport,
    ).as_dict()
    cfg["command"] = args.command
    cfg.update(extra)
    return cfg


def cmd_simulate(args):
    equatorial = args.mode == "p1"
    pairs = random_pairs(args.pairs, args.seed, equatorial=equatorial)
    rows = pair_study(pairs, args.n, args.seed, mode=args.mode)
    pvalue = chi_square_pvalue([r.z for r in rows if math.isfinite(r.z)])
    ok = all(r.passed for r in rows) and pvalue >= CHI2_LEVEL
    summary = {"chi2_pvalue": pvalue, "max_abs_z": max(abs(r.z) for r in rows), "pass": ok}
    cols = ["phiA", "thetaA", "phiB", "thetaB", "p_hat", "target", "z"]
    table = [[r.phiA, r.thetaA, r.phiB, r.thetaB, r.p_hat, r.target, r.z] for r in rows]
    return _config(args), cols, table, summary, ok


def cmd_verify_table(args):
    report = verify_table_bounds(args.grid)
    cols = ["jB", "cA", "cR", "cB", "gamma_lo", "gamma_hi", "min", "max", "ok"]
    table = [[*r.key, *r.interval, r.minimum, r.maximum, r.ok] for r in report.rows]
    summary = {"entries": len(report.rows), "failures": len(report.failures), "pass": report.ok}
    return _config(args, grid=args.grid), cols, table, summary, report.ok


def oracle_grid(points: int):
    """Cell-centred grid over phi_A in [0, pi/4) and phi_B in [0, pi)."""
    pa = (np.arange(points) + 0.5) * (math.pi / 4) / points
    pb = (np.arange(points) + 0.5) * math.pi / points
    return [(float(a), float(b)) for a in pa for b in pb]


def cmd_oracle_check(args):
    grid = args.grid or 20
    table = []
    max_dev = 0.0
    max_sym = 0.0
    for pa, pb in oracle_grid(grid):
        jb = min(int(4 * pb / math.pi), 3)
        branch = "less" if pa < pb - jb * math.pi / 4 else "geq"
        value = integral_agreement(pa, pb)
        target = (1.0 - math.cos(pa - pb)) / 2.0
        sym = max(abs(v) for v in symmetry_residuals(pa, pb).values())
        max_dev = max(max_dev, abs(value - target))
        max_sym = max(max_sym, sym)
        table.append([pa, pb, jb, branch, value, target, value - target, sym])
    ok = max_dev <= ORACLE_TOL and max_sym <= ORACLE_TOL
    cols = ["phiA", "phiB", "jB", "branch", "integral", "target", "deviation", "symmetry_residual"]
    summary = {"max_deviation": max_dev, "max_symmetry_residual": max_sym, "pass": ok}
    return _config(args, grid=grid), cols, table, summary, ok


def cmd_chsh(args):
    res = chsh(args.n, args.seed)
    cols = ["phiA", "phiB", "e_hat", "std_err", "target"]
    table = []
    settings = [(pa, pb) for pa in CHSH_X for pb in CHSH_Y]
    for (pa, pb), r in zip(settings, res.correlators):
        table.append([pa, pb, r.estimate, r.std_err, -math.cos(pa - pb)])
    ok = abs(abs(res.S) - res.target) <= CHSH_TOL
    summary = {"S": res.S, "std_err": res.std_err, "target": res.target, "pass": ok}
    return _config(args), cols, table, summary, ok


def cmd_bits_audit(args):
    runs = runs_for(args.mode)
    expected = EXPECTED_BITS[runs]
    settings = random_pairs(args.rounds, args.seed, equatorial=(runs == 1))
    result = run_session(args.mode, settings, args.rounds, args.seed,
                         transport=args.transport, tcp=TcpConfig(), check=False)
    table = []
    for r in range(args.rounds):
        edges = result.audit.rounds.get(r, {})
        total = result.audit.round_total(r)
        table.append([r, edges.get(("Alice", "Bob"), 0), edges.get(("Referee", "Bob"), 0), total])
    bad = result.audit.bad_rounds(args.rounds, expected)
    ok = not bad
    summary = {
        "expected_bits_per_round": expected,
        "session_bits": result.audit.session_total,
        "bad_rounds": len(bad),
        "wire_bytes": result.wire_bytes,
        "pass": ok,
    }
    cols = ["round", "alice_to_bob", "referee_to_bob", "bits"]
    return _config(args, rounds=args.rounds), cols, table, summary, ok


def cmd_multistage(args):
    m = args.m
    deltas = np.geomspace(math.pi / (10 * m), math.pi / m, args.deltas)
    slope, counts = scaling_study(m, deltas, args.n, args.seed)
    table = []
    ok = abs(slope - 3.0) <= SLOPE_TOL
    for d, hits in counts:
        p = hits / args.n
        target = chain_agreement_closed_form(m, 0.0, d)
        se = math.sqrt(p * (1 - p) / args.n)
        z = (p - target) / se if se > 0 else (0.0 if p == target else math.inf)
        ok = ok and abs(z) <= Z_PASS
        table.append([d, p, target, z])
    summary = {"slope": slope, "pass": ok}
    cols = ["delta", "p_hat", "target", "z"]
    return _config(args, m=m, deltas=args.deltas), cols, table, summary, ok


COMMANDS = {
    "simulate": cmd_simulate,
    "verify-table": cmd_verify_table,
    "oracle-check": cmd_oracle_check,
    "chsh": cmd_chsh,
    "bits-audit": cmd_bits_audit,
    "multistage": cmd_multistage,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (default: $SWAPSIM_SEED or built-in)")
    common.add_argument("--n", type=int, default=1_000_000, help="rounds per estimate")
    common.add_argument("--pairs", type=int, default=50, help="random setting pairs")
    common.add_argument("--grid", type=int, default=None, help="grid size")
    common.add_argument("--mode", choices=["p1", "full"], default="full")
    common.add_argument("--transport", choices=["inprocess", "tcp"], default="inprocess")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = argparse.ArgumentParser(prog="swapsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="agreement estimates for random pairs")
    sub.add_parser("verify-table", parents=[common], help="bounds of all 32 weight functions")
    sub.add_parser("oracle-check", parents=[common], help="quadrature vs closed form")
    sub.add_parser("chsh", parents=[common], help="CHSH value from four correlators")
    p = sub.add_parser("bits-audit", parents=[common], help="per-round bit accounting")
    p.add_argument("--rounds", type=int, default=1000)
    p = sub.add_parser("multistage", parents=[common], help="cubic scaling of the chain protocol")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--deltas", type=int, default=5)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seed is None:
        args.seed = default_seed()
    if args.grid is None and args.command == "verify-table":
        args.grid = 100_000
    try:
        config, cols, table, summary, ok = COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"swapsim: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_table(fh, args.format, config, cols, table, summary)
    else:
        write_table(sys.stdout, args.format, config, cols, table, summary)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
