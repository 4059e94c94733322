"""CHSH value as all four settings are rotated by a common angle.

Writes CSV (offset, S, std_err) to stdout; S should stay at 2*sqrt(2) in magnitude.
"""

import argparse
import csv
import math
import sys

import numpy as np

from swapsim.harness import chsh
from swapsim.streams import default_seed


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=1_000_000, help="rounds per setting")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--seed", type=int, default=None)
    args = p.parse_args(argv)
    seed = default_seed() if args.seed is None else args.seed
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["offset", "S", "std_err"])
    for k, off in enumerate(np.linspace(0.0, 2 * math.pi, args.steps, endpoint=False)):
        res = chsh(args.n, seed + k, offset=float(off))
        w.writerow([format(off, ".17g"), format(res.S, ".17g"), format(res.std_err, ".17g")])


if __name__ == "__main__":
    main()
