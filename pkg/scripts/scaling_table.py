"""Agreement versus delta for the warm-up and chain protocols, as one CSV.

Columns: protocol, m, delta, p_hat, std_err, target.  The warm-up grows
quadratically and the chain cubically in delta.
"""

import argparse
import csv
import math
import sys

import numpy as np

from swapsim.multistage import chain_agreement_closed_form, chain_count
from swapsim.oracle import warmup_agreement
from swapsim.streams import default_seed, derive_seed
from swapsim.warmup import warmup_count


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--deltas", type=int, default=8)
    p.add_argument("--seed", type=int, default=None)
    args = p.parse_args(argv)
    seed = default_seed() if args.seed is None else args.seed
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["protocol", "m", "delta", "p_hat", "std_err", "target"])
    deltas = np.geomspace(math.pi / (10 * args.m), math.pi / args.m, args.deltas)
    for i, d in enumerate(map(float, deltas)):
        for name, count, target in (
            ("warmup", warmup_count, warmup_agreement),
            ("chain", chain_count, chain_agreement_closed_form),
        ):
            ph = count(args.m, 0.0, d, args.n, derive_seed(seed, i, len(name))) / args.n
            se = math.sqrt(ph * (1 - ph) / args.n)
            w.writerow([name, args.m, *(format(v, ".17g") for v in (d, ph, se, target(args.m, 0.0, d)))])


if __name__ == "__main__":
    main()
