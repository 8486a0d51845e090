"""Command-line entry points.

    cspx project INPUT --k K [--variant equality|inequality] [--method newton|sort|bisect]
                       [--gamma0 G] --out OUT
    cspx bench --n N [--k K] --alpha A --trials T [--method newton,sort] --seed S --out CSV
    cspx regress simulate --m M --n N --p P --k-true K --snr SNR --seed S --out DIR
    cspx regress fit --X X --y Y --k K [--rho R] [--max-iters 50] [--w-true W] --out DIR

Exit codes: 0 success, 1 I/O or parse error, 2 infeasible input or
dimension mismatch, 3 iteration limit reached.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import fileio, simgen
from .baselines import project_bisection, project_exact_sort
from .core import InfeasibleInputError, NewtonConfig, ProjectionProblem, Status, Variant, project_capped_simplex
from .regression import PQNConfig, RegressionProblem, accuracy, pqn_solve

EXIT_OK, EXIT_IO, EXIT_INFEASIBLE, EXIT_MAXITER = 0, 1, 2, 3
METHODS = ("newton", "sort", "bisect")
SUMMARY_FIELDS = ["method", "n", "k", "alpha", "trials", "time_mean", "time_std", "iters_mean", "iters_std"]


def _solve(method: str, problem: ProjectionProblem, tol, max_iters, gamma0=None):
    if method == "newton":
        cfg = NewtonConfig(residual_tol=tol, max_iters=max_iters, gamma0_override=gamma0)
        return project_capped_simplex(problem, cfg)
    if method == "sort":
        return project_exact_sort(problem)
    if method == "bisect":
        return project_bisection(problem, tol=tol or 1e-14)
    raise ValueError(f"unknown method {method!r}")


def timed_solve(method, problem, tol=None, max_iters=100, gamma0=None):
    t0 = time.perf_counter()
    res = _solve(method, problem, tol, max_iters, gamma0)
    return res, time.perf_counter() - t0


def _exit_for(status: Status) -> int:
    if status is Status.CONVERGED:
        return EXIT_OK
    if status is Status.MAX_ITERS:
        return EXIT_MAXITER
    return EXIT_INFEASIBLE


def _err(msg: str) -> None:
    print(f"cspx: {msg}", file=sys.stderr)


def cmd_project(args) -> int:
    try:
        y = fileio.read_vector(args.input)
    except (OSError, fileio.FormatError) as exc:
        _err(f"cannot read {args.input}: {exc}")
        return EXIT_IO
    variant = Variant.parse(args.variant)
    problem = ProjectionProblem(y, args.k, variant)
    try:
        res, dt = timed_solve(args.method, problem, args.tol, args.max_iters, args.gamma0)
    except InfeasibleInputError as exc:
        _err(str(exc))
        print(fileio.report_line(args.method, problem.n, args.k, variant.value, 0, math.nan, 0.0,
                                 None, Status.INFEASIBLE.value))
        return EXIT_INFEASIBLE
    try:
        fileio.write_vector(args.out, res.x)
    except OSError as exc:
        _err(f"cannot write {args.out}: {exc}")
        return EXIT_IO
    print(fileio.report_line(args.method, problem.n, args.k, variant.value, res.iterations,
                             res.feasibility_gap, dt, None, res.status.value, gamma=res.gamma))
    return _exit_for(res.status)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("CSPX_THREADS", "1")))
    except ValueError:
        return 1


def run_bench(n, k, alpha, trials, methods, seed, variant=Variant.EQUALITY, tol=None, max_iters=100):
    """Per-trial records for every method; trial t draws y with seed + t."""

    def one(t):
        s = seed + t
        y = simgen.sample_projection_input(n, alpha, s)
        kk = k
        if kk is None:
            # integer in [1, n - 1] for the slice, like the random-k protocol
            kk = float(1 + int(simgen.uniforms(simgen.stream("bench-k", s), 1)[0] * max(n - 1, 1)))
            if kk >= n:
                kk = n / 2
        problem = ProjectionProblem(y, kk, variant)
        out = []
        for method in methods:
            res, dt = timed_solve(method, problem, tol, max_iters)
            out.append(dict(method=method, n=n, k=kk, variant=problem.variant.value,
                            iterations=res.iterations, feasibility_gap=res.feasibility_gap,
                            wall_time_seconds=dt, seed=s, status=res.status.value))
        return out

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        per_trial = list(pool.map(one, range(trials)))
    return [rec for recs in per_trial for rec in recs]


def summarize(records, methods, n, k, alpha, trials):
    rows = []
    for method in methods:
        rs = [r for r in records if r["method"] == method]
        t = np.array([r["wall_time_seconds"] for r in rs])
        it = np.array([r["iterations"] for r in rs], dtype=float)
        rows.append(dict(method=method, n=n, k="random" if k is None else k, alpha=alpha, trials=trials,
                         time_mean=t.mean(), time_std=t.std(), iters_mean=it.mean(), iters_std=it.std()))
    return rows


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        _err(f"unknown method(s): {bad}")
        return EXIT_IO
    if args.trials < 1 or args.n < 1:
        _err("--trials and --n must be positive")
        return EXIT_IO
    variant = Variant.parse(args.variant)
    for m in methods:  # compile kernels before anything is timed
        _solve(m, ProjectionProblem(np.array([0.1, 0.7, 0.4]), 1.0), None, 100)
    try:
        records = run_bench(args.n, args.k, args.alpha, args.trials, methods, args.seed,
                            variant, args.tol, args.max_iters)
    except InfeasibleInputError as exc:
        _err(str(exc))
        return EXIT_INFEASIBLE
    for rec in records:
        print(fileio.report_line(**rec))
    rows = summarize(records, methods, args.n, args.k, args.alpha, args.trials)
    if args.out:
        try:
            new = not Path(args.out).exists() or Path(args.out).stat().st_size == 0
            with open(args.out, "a", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS)
                if new:
                    w.writeheader()
                w.writerows(rows)
        except OSError as exc:
            _err(f"cannot write {args.out}: {exc}")
            return EXIT_IO
    statuses = {r["status"] for r in records}
    return EXIT_OK if statuses == {Status.CONVERGED.value} else EXIT_MAXITER


def cmd_simulate(args) -> int:
    try:
        cfg = simgen.SimulationConfig(m=args.m, n=args.n, p=args.p, k_true=args.k_true,
                                      snr=args.snr, seed=args.seed)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INFEASIBLE
    data = simgen.generate_dataset(cfg)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        fileio.write_matrix(out / "X.cspx", data.X)
        fileio.write_vector(out / "y.cspx", data.y)
        fileio.write_vector(out / "w_true.cspx", data.w_true)
    except OSError as exc:
        _err(f"cannot write to {out}: {exc}")
        return EXIT_IO
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        X = fileio.read_matrix(args.X)
        y = fileio.read_vector(args.y)
        w_true = fileio.read_vector(args.w_true) if args.w_true else None
    except (OSError, fileio.FormatError) as exc:
        _err(str(exc))
        return EXIT_IO
    if X.shape[0] != y.shape[0] or (w_true is not None and w_true.shape[0] != X.shape[1]):
        _err(f"dimension mismatch: X is {X.shape}, y has {y.shape[0]} entries")
        return EXIT_INFEASIBLE
    try:
        problem = RegressionProblem(X, y, args.k, args.rho)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INFEASIBLE
    t0 = time.perf_counter()
    fit = pqn_solve(problem, PQNConfig(max_iters=args.max_iters, projector=args.projector))
    dt = time.perf_counter() - t0

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        fileio.write_vector(out / "u.cspx", fit.u)
        fileio.write_vector(out / "w.cspx", fit.w)
        fileio.write_vector(out / "objective_trace.cspx", np.asarray(fit.objective_trace))
        (out / "support.txt").write_text("".join(f"{i}\n" for i in fit.support))
    except OSError as exc:
        _err(f"cannot write to {out}: {exc}")
        return EXIT_IO

    gap = max(float(fit.u.sum()) - problem.k, 0.0)
    extra = dict(objective=fit.objective, support_size=int(fit.support.size), rho=problem.rho,
                 support=[int(i) for i in fit.support])
    if w_true is not None:
        extra["acc"] = accuracy(fit.w, w_true)
    print(fileio.report_line("pqn", problem.n, problem.k, Variant.INEQUALITY.value, fit.iterations,
                             gap, dt, None, fit.status.value, **extra))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cspx", description="Projection onto the k-capped simplex.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project one vector")
    p.add_argument("input")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--variant", default="equality", choices=["equality", "inequality"])
    p.add_argument("--method", default="newton", choices=METHODS)
    p.add_argument("--tol", type=float, default=None, help="residual tol (newton) or bracket width (bisect)")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--gamma0", type=float, default=None, help="Newton start (default: bracket midpoint)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    b = sub.add_parser("bench", help="timing/iteration benchmark on U[-alpha, alpha] inputs")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--k", type=float, default=None, help="omit for a random integer k per trial")
    b.add_argument("--alpha", type=float, default=0.5)
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--method", default="newton", help="comma-separated subset of newton,sort,bisect")
    b.add_argument("--variant", default="equality", choices=["equality", "inequality"])
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--tol", type=float, default=None)
    b.add_argument("--max-iters", type=int, default=100)
    b.add_argument("--out", default=None, help="CSV file that summary rows are appended to")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("regress", help="sparse regression workflows")
    rsub = r.add_subparsers(dest="regress_command", required=True)
    s = rsub.add_parser("simulate")
    s.add_argument("--m", type=int, default=100)
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--p", type=float, default=0.2)
    s.add_argument("--k-true", type=int, default=20)
    s.add_argument("--snr", type=float, default=6.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_simulate)
    f = rsub.add_parser("fit")
    f.add_argument("--X", required=True)
    f.add_argument("--y", required=True)
    f.add_argument("--k", type=float, required=True)
    f.add_argument("--rho", type=float, default=None, help="default 1/sqrt(m)")
    f.add_argument("--max-iters", type=int, default=50)
    f.add_argument("--projector", default="newton", choices=["newton", "sort"])
    f.add_argument("--w-true", default=None)
    f.add_argument("--out", required=True, help="output directory")
    f.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
