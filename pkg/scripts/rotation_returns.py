#!/usr/bin/env python3
"""Least simultaneous return times of a rotation across an epsilon grid.

Compares the full scan with the convergent-denominator shortcut; the scan
value is the true least witness, the shortcut is merely admissible.
"""

import argparse
from fractions import Fraction

from shiftrec.rotation import (
    RotationSystem,
    cf_accelerated_return,
    dirichlet_ceiling,
    find_multi_return,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", default="golden")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--steps", type=int, default=6, help="epsilon = 1/10 .. 1/(10*2^steps)")
    args = ap.parse_args()

    system = RotationSystem(args.alpha)
    print("epsilon,ceiling,scan_n,cf_n")
    eps = Fraction(1, 10)
    for _ in range(args.steps):
        ceiling = dirichlet_ceiling(args.k, eps)
        scan = find_multi_return(system, args.k, eps, ceiling)
        cf = cf_accelerated_return(system, args.k, eps)
        scan_n = "" if scan is None else scan.n
        print(f"{eps.numerator}/{eps.denominator},{ceiling},{scan_n},{cf.n}")
        eps /= 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
