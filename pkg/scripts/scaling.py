"""Median solve time per method as n grows; prints ratios between successive sizes."""
import argparse
import csv
import sys

import numpy as np

from cspx.cli import run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", default="1000,10000,100000,1000000,10000000")
    ap.add_argument("--methods", default="newton,sort")
    ap.add_argument("--k", type=float, default=100.0)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    methods = args.methods.split(",")
    run_bench(16, 4.0, 0.5, 1, methods, 0)  # warm up the jit kernels
    out = csv.writer(sys.stdout)
    out.writerow(["method", "n", "median_s", "ratio_to_previous"])
    prev = {}
    for n in (int(v) for v in args.ns.split(",")):
        recs = run_bench(n, args.k, 0.5, args.trials, methods, args.seed)
        for m in methods:
            med = float(np.median([r["wall_time_seconds"] for r in recs if r["method"] == m]))
            ratio = f"{med / prev[m]:.2f}" if m in prev else ""
            out.writerow([m, n, f"{med:.6f}", ratio])
            prev[m] = med
        sys.stdout.flush()


if __name__ == "__main__":
    main()
