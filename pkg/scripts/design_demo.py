"""Iterate a small expander into approximate designs and measure the 1-norm distance.

    python scripts/design_demo.py --n 4 --k 1
"""

import argparse
import warnings

from tpx.designs import DesignSpec, design_distances, iterate_moment
from tpx.ensembles import PermDistribution
from tpx.gaps import quantum_gap, theorem_construction


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ens, _ = theorem_construction(PermDistribution.random(args.n, args.d, args.seed), args.k, seed=args.seed)
    lam = quantum_gap(ens, seed=args.seed).lambda_measured
    print(f"lambda = {lam:.6f}")
    print(f"{'eps':>8} {'m':>5} {'1-norm':>10} {'op-norm':>10} {'words':>8}")
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        spec = DesignSpec.build(ens, eps, lam)
        one, inf = design_distances(iterate_moment(ens, spec.m), args.k)
        print(f"{eps:8.0e} {spec.m:5d} {one:10.3e} {inf:10.3e} {'%.2e' % spec.word_count:>8}")


if __name__ == "__main__":
    main()
