"""Mean/std Newton iterations and solve time over n and k (y ~ U[-0.5, 0.5]).

    python3 scripts/iteration_table.py --trials 100 > iterations.csv
"""
import argparse
import csv
import sys

import numpy as np

from cspx.cli import run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--ns", default="10000,100000,1000000")
    ap.add_argument("--ks", default="10,100,1000,10000,100000", help="k sweep run at the largest n")
    args = ap.parse_args()

    ns = [int(v) for v in args.ns.split(",")]
    ks = [float(v) for v in args.ks.split(",")]
    grid = [(n, 100.0) for n in ns] + [(ns[-1], k) for k in ks if k < ns[-1] and k != 100.0]

    run_bench(16, 4.0, 0.5, 1, ["newton"], 0)  # warm up the jit kernels
    out = csv.writer(sys.stdout)
    out.writerow(["n", "k", "iters_mean", "iters_std", "time_ms_mean", "time_ms_std"])
    for n, k in grid:
        recs = run_bench(n, k, 0.5, args.trials, ["newton"], args.seed)
        it = np.array([r["iterations"] for r in recs], float)
        t = np.array([r["wall_time_seconds"] for r in recs]) * 1e3
        out.writerow([n, k, f"{it.mean():.2f}", f"{it.std():.2f}", f"{t.mean():.3f}", f"{t.std():.3f}"])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
