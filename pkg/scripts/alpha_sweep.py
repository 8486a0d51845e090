"""Iterations and time versus the input spread alpha (y ~ U[-alpha, alpha])."""
import argparse
import csv
import sys

import numpy as np

from cspx.cli import run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--k", type=float, default=100.0)
    ap.add_argument("--alphas", default="0.5,1,10,100,1000")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = csv.writer(sys.stdout)
    out.writerow(["alpha", "iters_mean", "iters_std", "time_ms_median"])
    for alpha in (float(a) for a in args.alphas.split(",")):
        recs = run_bench(args.n, args.k, alpha, args.trials, ["newton"], args.seed)
        it = np.array([r["iterations"] for r in recs], float)
        t = np.median([r["wall_time_seconds"] for r in recs]) * 1e3
        out.writerow([alpha, f"{it.mean():.2f}", f"{it.std():.2f}", f"{t:.3f}"])


if __name__ == "__main__":
    main()
