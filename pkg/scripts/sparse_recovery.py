"""Support-recovery accuracy of the relaxed fit versus sample size m.

For each m and seed: simulate (n, p, k_true, snr), fit with k = k_true and
rho = 1/sqrt(m), round to the top-k support, and score Acc.
"""
import argparse
import csv
import sys

import numpy as np

from cspx.regression import PQNConfig, RegressionProblem, accuracy, pqn_solve
from cspx.simgen import SimulationConfig, generate_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ms", default="100,200,300,500")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--ps", default="0.2,0.7")
    ap.add_argument("--k-true", type=int, default=20)
    ap.add_argument("--snr", type=float, default=6.0)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--max-iters", type=int, default=50)
    args = ap.parse_args()

    out = csv.writer(sys.stdout)
    out.writerow(["p", "m", "acc_median", "acc_mean", "acc_min", "objective_median"])
    for p in (float(v) for v in args.ps.split(",")):
        for m in (int(v) for v in args.ms.split(",")):
            accs, objs = [], []
            for seed in range(args.seeds):
                data = generate_dataset(SimulationConfig(m=m, n=args.n, p=p, k_true=args.k_true,
                                                         snr=args.snr, seed=seed))
                fit = pqn_solve(RegressionProblem(data.X, data.y, float(args.k_true)),
                                PQNConfig(max_iters=args.max_iters))
                accs.append(accuracy(fit.w, data.w_true))
                objs.append(fit.objective)
            out.writerow([p, m, f"{np.median(accs):.3f}", f"{np.mean(accs):.3f}", f"{min(accs):.3f}",
                          f"{np.median(objs):.4g}"])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
