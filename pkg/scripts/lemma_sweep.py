"""lambda_A * sqrt(N) along a geometric grid, both routes where the dense one fits.

    python scripts/lemma_sweep.py --k 2 --n 16:4096:x4
"""

import argparse
import math
import time

from tpx.cli import parse_grid
from tpx.gaps import lemma_gap_lambda_A
from tpx.states import TupleSpace


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--n", type=parse_grid, default=parse_grid("16:4096:x4"))
    args = ap.parse_args()
    print(f"{'N':>6} {'lambda_A':>12} {'lambda_A*sqrtN':>15} {'dense':>12} {'ms':>8}")
    for N in args.n:
        t = time.perf_counter()
        lam = lemma_gap_lambda_A(N, args.k).lambda_measured
        ms = (time.perf_counter() - t) * 1000
        dense = ""
        if TupleSpace(N, 2 * args.k).dim <= 4096:
            dense = f"{lemma_gap_lambda_A(N, args.k, 'dense').lambda_measured:.10f}"
        print(f"{N:>6} {lam:12.10f} {lam * math.sqrt(N):15.6f} {dense:>12} {ms:8.1f}")


if __name__ == "__main__":
    main()
