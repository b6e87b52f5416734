#!/usr/bin/env python3
"""Print (1/n) log P(mean_n >= x) next to its limit for a few finite laws.

    python3 scripts/convergence_table.py --n-max 256
"""
import argparse
import math

import numpy as np

from ldpcheck import DistributionSpec
from ldpcheck.distributions import essential_sup, mean
from ldpcheck.entropy import entropy_curve

LAWS = {
    "bernoulli:0.5": DistributionSpec.bernoulli(0.5),
    "bernoulli:0.1": DistributionSpec.bernoulli(0.1),
    "discrete:-1:0.5,2:0.3,5:0.2": DistributionSpec.discrete([-1, 2, 5], [0.5, 0.3, 0.2]),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=128)
    ap.add_argument("--fractions", default="0.25,0.5,0.75",
                    help="x = mean + f (c - mean) for each f")
    args = ap.parse_args()

    fr = [float(f) for f in args.fractions.split(",")]
    ns = [2 ** k for k in range(int(math.log2(args.n_max)) + 1)]
    for name, spec in LAWS.items():
        m, c = mean(spec), essential_sup(spec)
        xs = [m + f * (c - m) for f in fr]
        curve = entropy_curve(spec, xs, ns)
        print(f"\n{name}   (mean {m:g}, c {c:g})")
        print("   n " + "".join(f"  x={x:<10.4g}" for x in xs))
        for i, n in enumerate(ns):
            print(f"{n:4d} " + "".join(f"  {v:<12.6f}" for v in curve.values[i]))
        print(" lim " + "".join(f"  {v:<12.6f}" for v in curve.predicted))
        gap = curve.predicted - curve.values[-1]
        print(" gap " + "".join(f"  {v:<12.2e}" for v in gap))
        assert np.all(gap >= -1e-12)


if __name__ == "__main__":
    main()
