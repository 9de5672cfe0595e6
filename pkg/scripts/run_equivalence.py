"""Two-sided equivalence run over random problems in every theorem regime.

    python3 scripts/run_equivalence.py --n 20 --budget 2000 --out results/equivalence.csv
"""

import argparse
import csv
import math
import time

from cesaro.cli import equivalence
from cesaro.embedding import FORMULAS
from cesaro.oracle import best_constant_lower_bound
from cesaro.problems import random_problems


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=2000)
    ap.add_argument("--K", type=float, default=32.0)
    ap.add_argument("--regimes", default=",".join(FORMULAS))
    ap.add_argument("--out")
    args = ap.parse_args()

    rows = []
    for tag in args.regimes.split(","):
        t0 = time.perf_counter()
        for rp in random_problems(tag, n=args.n, seed=args.seed):
            L = best_constant_lower_bound(rp.problem, budget=args.budget, seed=args.seed).value
            ok = equivalence(rp.constant, L, args.K)
            rows.append((tag, rp.index, rp.constant, L, L / rp.constant, ok))
        bad = [r for r in rows if r[0] == tag and not r[5]]
        print(f"{tag:5s} {time.perf_counter() - t0:6.1f}s  failures {[(r[1], round(math.log10(r[4]), 2)) for r in bad]}")
    passed = sum(r[5] for r in rows)
    print(f"{passed}/{len(rows)} within K = {args.K:g}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["regime", "index", "T", "L", "L_over_T", "pass"])
            wr.writerows(rows)


if __name__ == "__main__":
    main()
