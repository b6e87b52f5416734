#!/usr/bin/env python3
"""Relative standard error of naive vs exponentially tilted Monte Carlo as
the event gets rarer.

    python3 scripts/tilting_variance.py --trials 50000 --dist bernoulli:0.5 --x 0.8
"""
import argparse

from ldpcheck import parse_spec
from ldpcheck.distributions import FINITE_KINDS
from ldpcheck.tail import tail


def rel(e):
    return e.stderr / e.prob if e.prob > 0 else float("inf")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dist", default="bernoulli:0.5")
    ap.add_argument("--x", type=float, default=0.8)
    ap.add_argument("--n-list", default="5,10,20,40,80,160")
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = parse_spec(args.dist)
    exact = spec.kind in FINITE_KINDS
    print(f"{'n':>4} {'exact':>12} {'tilted':>12} {'rel_se':>9} {'naive':>12} {'rel_se':>9}")
    for n in map(int, args.n_list.split(",")):
        t = tail(spec, n, args.x, "tilted", args.trials, args.seed)
        nv = tail(spec, n, args.x, "naive", args.trials, args.seed)
        ex = f"{tail(spec, n, args.x).prob:12.4e}" if exact else f"{'-':>12}"
        print(f"{n:4d} {ex} {t.prob:12.4e} {rel(t):9.4f} {nv.prob:12.4e} {rel(nv):9.4f}")


if __name__ == "__main__":
    main()
