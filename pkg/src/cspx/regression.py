"""Boolean-relaxed sparse ridge regression.

Minimises G(u) = y^T ((1/rho) X diag(u) X^T + I)^{-1} y over the capped
simplex {u in [0,1]^n, sum(u) <= k} with a spectral projected gradient
method, using the Newton projection as the inner step. For a 0/1 vector u
with support S, G(u) equals the optimal value of ridge regression on the
columns in S with penalty rho * ||w||^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .baselines import project_exact_sort
from .core import NewtonConfig, ProjectionProblem, Status, Variant, project_capped_simplex


class FactorizationFailure(np.linalg.LinAlgError):
    """The m x m system matrix is not numerically positive definite."""


@dataclass
class RegressionProblem:
    X: np.ndarray
    y: np.ndarray
    k: float
    rho: Optional[float] = None  # None -> 1/sqrt(m)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64).ravel()
        if self.X.ndim != 2:
            raise ValueError("X must be a matrix")
        m, n = self.X.shape
        if m < 1 or n < 1:
            raise ValueError("X must be non-empty")
        if self.y.shape[0] != m:
            raise ValueError(f"X has {m} rows but y has {self.y.shape[0]} entries")
        if self.rho is None:
            self.rho = 1.0 / math.sqrt(m)
        self.rho = float(self.rho)
        self.k = float(self.k)
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not 0 < self.k <= n:
            raise ValueError(f"k must lie in (0, n], got {self.k}")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise ValueError("X and y must be finite")

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def k_int(self) -> int:
        return int(math.floor(self.k))


@dataclass(frozen=True)
class PQNConfig:
    max_iters: int = 50
    memory: int = 10          # nonmonotone window
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 30
    step_min: float = 1e-10
    step_max: float = 1e10
    opt_tol: float = 1e-9     # stop when ||P(u - g) - u||_inf is below this
    projector: str = "newton"  # or "sort"


@dataclass
class FitResult:
    u: np.ndarray
    w: np.ndarray
    objective_trace: list
    iterations: int
    support: np.ndarray
    status: Status = Status.CONVERGED
    objective: float = math.nan
    iterates: list = field(default_factory=list)


def _factor(problem: RegressionProblem, u) -> tuple:
    u = np.asarray(u, dtype=np.float64)
    X = problem.X
    M = (X * u) @ X.T
    M /= problem.rho
    M[np.diag_indices_from(M)] += 1.0
    try:
        return scipy.linalg.cho_factor(M, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise FactorizationFailure(f"system matrix not positive definite: {exc}") from exc


def eval_objective_G(problem: RegressionProblem, u) -> float:
    c = _factor(problem, u)
    v = scipy.linalg.cho_solve(c, problem.y)
    return float(problem.y @ v)


def eval_gradient_G(problem: RegressionProblem, u) -> np.ndarray:
    return objective_and_gradient(problem, u)[1]


def objective_and_gradient(problem: RegressionProblem, u) -> tuple[float, np.ndarray]:
    """G(u) and its gradient from one Cholesky factorisation.

    dG/du_j = -(1/rho) (x_j^T v)^2 with v = M^{-1} y.
    """
    c = _factor(problem, u)
    v = scipy.linalg.cho_solve(c, problem.y)
    xv = problem.X.T @ v
    return float(problem.y @ v), -(xv * xv) / problem.rho


def _projector(problem: RegressionProblem, name: str) -> Callable[[np.ndarray], np.ndarray]:
    if name == "newton":
        cfg = NewtonConfig()
        return lambda z: project_capped_simplex(ProjectionProblem(z, problem.k, Variant.INEQUALITY), cfg).x
    if name == "sort":
        return lambda z: project_exact_sort(ProjectionProblem(z, problem.k, Variant.INEQUALITY)).x
    raise ValueError(f"unknown projector {name!r}")


def pqn_solve(problem: RegressionProblem, config: PQNConfig | None = None,
              u0=None, keep_iterates: bool = False) -> FitResult:
    """Spectral projected gradient with Barzilai-Borwein steps and a nonmonotone arc search.

    Every trial point is P(u - t * g) for the current spectral step t, halved
    (with a quadratic-interpolation safeguard) until the nonmonotone Armijo
    test against the max of the last ``memory`` objective values holds.
    """
    config = config or PQNConfig()
    proj = _projector(problem, config.projector)
    n = problem.n
    u = proj(np.full(n, problem.k / n) if u0 is None else np.asarray(u0, dtype=np.float64))
    f, g = objective_and_gradient(problem, u)
    trace = [f]
    iterates = [u.copy()] if keep_iterates else []
    best_u, best_f = u, f
    status = Status.CONVERGED

    d = proj(u - g) - u
    dn = np.max(np.abs(d))
    step = 1.0 / dn if dn > 0 else 1.0
    step = min(max(step, config.step_min), config.step_max)

    it = 0
    while it < config.max_iters:
        if np.max(np.abs(proj(u - g) - u)) <= config.opt_tol:
            break
        f_ref = max(trace[-config.memory:])
        t = step
        accepted = False
        for _ in range(config.max_backtracks):
            u_new = proj(u - t * g)
            s = u_new - u
            gts = float(g @ s)
            f_new, g_new = objective_and_gradient(problem, u_new)
            if f_new <= f_ref + config.sufficient_decrease * gts:
                accepted = True
                break
            # quadratic model along the arc, kept within [0.1 t, 0.5 t]
            denom = 2.0 * (f_new - f - gts)
            t_q = -gts * t / denom if denom > 0 else 0.5 * t
            t = min(max(t_q, 0.1 * t), 0.5 * t)
        if not accepted:
            status = Status.LINE_SEARCH_STALLED
            break

        it += 1
        yv = g_new - g
        sty = float(s @ yv)
        sts = float(s @ s)
        step = config.step_max if sty <= 0 else min(max(sts / sty, config.step_min), config.step_max)
        u, f, g = u_new, f_new, g_new
        trace.append(f)
        if keep_iterates:
            iterates.append(u.copy())
        if f < best_f:
            best_u, best_f = u, f
        if sts == 0.0:
            break

    w = round_support(problem, best_u)
    return FitResult(u=best_u, w=w, objective_trace=trace, iterations=it,
                     support=np.flatnonzero(w != 0), status=status, objective=best_f,
                     iterates=iterates)


def top_k_support(u, k_int: int) -> np.ndarray:
    """Indices of the k_int largest entries of u, ties to the lower index, ascending."""
    u = np.asarray(u, dtype=np.float64)
    order = np.lexsort((np.arange(u.shape[0]), -u))
    return np.sort(order[:k_int])


def ridge_on_support(problem: RegressionProblem, support) -> np.ndarray:
    """Minimiser of ||y - X_S w||^2 + rho ||w||^2, embedded in R^n."""
    support = np.asarray(support, dtype=np.intp)
    w = np.zeros(problem.n)
    if support.size == 0:
        return w
    Xs = problem.X[:, support]
    A = Xs.T @ Xs
    A[np.diag_indices_from(A)] += problem.rho
    w[support] = scipy.linalg.solve(A, Xs.T @ problem.y, assume_a="pos")
    return w


def round_support(problem: RegressionProblem, u) -> np.ndarray:
    return ridge_on_support(problem, top_k_support(u, problem.k_int))


def ridge_objective(problem: RegressionProblem, w) -> float:
    r = problem.y - problem.X @ w
    return float(r @ r + problem.rho * (w @ w))


def accuracy(w, w_true) -> float:
    """Fraction of the true nonzero positions that are nonzero in w."""
    w = np.asarray(w)
    w_true = np.asarray(w_true)
    true_nz = w_true != 0
    denom = int(np.count_nonzero(true_nz))
    if denom == 0:
        raise ValueError("w_true has no nonzero entries")
    return np.count_nonzero((w != 0) & true_nz) / denom
