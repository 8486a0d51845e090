"""Projection onto the k-capped simplex by safeguarded Newton on the dual scalar.

For a multiplier ``gamma`` the box-constrained minimiser is
``x(gamma) = min(1, [y - gamma]_+)``. The dual objective ``omega`` has

    omega'(gamma)  = k - sum(x(gamma))               (nondecreasing)
    omega''(gamma) = #{i : 0 < y_i - gamma < 1}

so the projection reduces to finding the root of a monotone piecewise-linear
scalar function. Newton steps are exact on each linear piece; a shrinking
sign-change bracket with bisection fallback makes termination unconditional.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._kernels import clipped_sum_and_count, compensated_sum


class Variant(str, enum.Enum):
    EQUALITY = "equality"      # sum(x) == k
    INEQUALITY = "inequality"  # sum(x) <= k

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        aliases = {"eq": cls.EQUALITY, "equality": cls.EQUALITY, "slice": cls.EQUALITY,
                   "ineq": cls.INEQUALITY, "inequality": cls.INEQUALITY, "cap": cls.INEQUALITY}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown variant {value!r}") from None


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxItersReached"
    INFEASIBLE = "InfeasibleInput"
    NO_ROOT = "NoRoot"
    LINE_SEARCH_STALLED = "LineSearchStalled"


class InfeasibleInputError(ValueError):
    """The requested set is empty or the input vector is not finite."""


class InfeasibleBracketError(ValueError):
    """No sign change of omega' can be guaranteed on [min(y) - 1, max(y)]."""


@dataclass(frozen=True)
class ProjectionProblem:
    y: np.ndarray
    k: float
    variant: Variant = Variant.EQUALITY

    def __post_init__(self):
        object.__setattr__(self, "y", np.ascontiguousarray(self.y, dtype=np.float64).ravel())
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "variant", Variant.parse(self.variant))

    @property
    def n(self) -> int:
        return self.y.shape[0]

    def check(self) -> None:
        """Raise InfeasibleInputError unless the problem is well posed."""
        if self.n < 1:
            raise InfeasibleInputError("y must have at least one entry")
        if not np.all(np.isfinite(self.y)):
            raise InfeasibleInputError("y contains non-finite entries")
        if not math.isfinite(self.k):
            raise InfeasibleInputError(f"k must be finite, got {self.k}")
        if self.k < 0:
            raise InfeasibleInputError(f"k must be nonnegative, got {self.k}")
        if self.variant is Variant.EQUALITY and self.k > self.n:
            raise InfeasibleInputError(f"equality slice needs k <= n, got k={self.k}, n={self.n}")


@dataclass(frozen=True)
class NewtonConfig:
    # None -> 1e-10 * max(1, |k|)
    residual_tol: Optional[float] = None
    step_tol: float = 1e-14
    max_iters: int = 100
    gamma0_override: Optional[float] = None

    def __post_init__(self):
        if self.residual_tol is not None and not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if not self.step_tol > 0:
            raise ValueError("step_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    def tol_for(self, k: float) -> float:
        if self.residual_tol is not None:
            return self.residual_tol
        return 1e-10 * max(1.0, abs(k))


@dataclass(frozen=True)
class DerivativePair:
    first: float   # omega'(gamma)
    second: int    # omega''(gamma)


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass
class ProjectionResult:
    x: np.ndarray
    gamma: float
    iterations: int
    feasibility_gap: float
    status: Status
    # +1: k == 0 pinned x at 0 (gamma = +inf); -1: k == n pinned x at 1 (gamma = -inf)
    saturated: int = 0
    # (lo, hi) after each update; only filled when requested
    brackets: list = field(default_factory=list)


def candidate_x(y, gamma: float) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    return np.minimum(1.0, np.maximum(y - gamma, 0.0))


def eval_omega_derivatives(y, k: float, gamma: float) -> DerivativePair:
    y = np.ascontiguousarray(y, dtype=np.float64)
    total, count = clipped_sum_and_count(y, float(gamma))
    return DerivativePair(first=float(k) - total, second=int(count))


def initial_bracket(y, k: float) -> Bracket:
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if not 0 < k < n:
        raise InfeasibleBracketError(f"bracket requires 0 < k < n, got k={k}, n={n}")
    ymin = float(y.min())
    lo = ymin - 1.0
    # rounding can leave ymin - lo just under 1; step down until every entry saturates
    while ymin - lo < 1.0:
        lo = math.nextafter(lo, -math.inf)
    return Bracket(lo=lo, hi=float(y.max()))


def feasibility_gap(x, k: float, variant) -> float:
    s = compensated_sum(x)
    if Variant.parse(variant) is Variant.EQUALITY:
        return abs(s - k)
    return max(s - k, 0.0)


def _saturated_result(y, k, variant, side: int) -> ProjectionResult:
    gamma = math.inf if side > 0 else -math.inf
    x = candidate_x(y, gamma)
    return ProjectionResult(x=x, gamma=gamma, iterations=0,
                            feasibility_gap=feasibility_gap(x, k, variant),
                            status=Status.CONVERGED, saturated=side)


def solve_root(y: np.ndarray, k: float, config: NewtonConfig,
               record: bool = False) -> tuple[float, int, Status, list]:
    """Safeguarded Newton on omega' for 0 < k < n. Returns (gamma, iters, status, brackets)."""
    br = initial_bracket(y, k)
    lo, hi = br.lo, br.hi
    tol = config.tol_for(k)
    if config.gamma0_override is not None:
        gamma = float(config.gamma0_override)
        if not lo <= gamma <= hi:
            gamma = min(max(gamma, lo), hi)
    else:
        gamma = 0.5 * (lo + hi)

    history = [(lo, hi)] if record else []
    d = eval_omega_derivatives(y, k, gamma)
    it = 0
    while True:
        if abs(d.first) <= tol:
            return gamma, it, Status.CONVERGED, history
        if it >= config.max_iters:
            return gamma, it, Status.MAX_ITERS, history

        # omega' nondecreasing: the sign tells which side the root is on
        if d.first < 0:
            lo = gamma
        else:
            hi = gamma
        if record:
            history.append((lo, hi))

        nxt = math.nan
        if d.second > 0:
            nxt = gamma - d.first / d.second
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)

        step = abs(nxt - gamma)
        gamma = nxt
        it += 1
        d = eval_omega_derivatives(y, k, gamma)
        if step <= config.step_tol * (1.0 + abs(gamma)):
            # bracket collapsed to machine resolution around the root
            status = Status.CONVERGED if abs(d.first) <= tol or hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi))) \
                else Status.MAX_ITERS
            return gamma, it, status, history


def project_capped_simplex(problem: ProjectionProblem, config: NewtonConfig | None = None,
                           record: bool = False) -> ProjectionResult:
    """Euclidean projection of ``problem.y`` onto the capped simplex or its equality slice.

    Raises InfeasibleInputError for an empty feasible set or non-finite data.
    Failure to meet the residual tolerance is reported through ``status``,
    never raised. With ``record=True`` the per-iteration bracket is kept on
    the result.
    """
    config = config or NewtonConfig()
    problem.check()
    y, k, variant, n = problem.y, problem.k, problem.variant, problem.n

    if variant is Variant.INEQUALITY:
        if k == 0.0:
            return _saturated_result(y, k, variant, +1)
        x0 = candidate_x(y, 0.0)
        if compensated_sum(x0) <= k:
            # cap inactive
            return ProjectionResult(x=x0, gamma=0.0, iterations=0,
                                    feasibility_gap=feasibility_gap(x0, k, variant),
                                    status=Status.CONVERGED)
        # here 0 < k < sum(x0) <= n and the equality root is positive
    else:
        if k == 0.0:
            return _saturated_result(y, k, variant, +1)
        if k == n:
            return _saturated_result(y, k, variant, -1)

    gamma, iters, status, history = solve_root(y, k, config, record=record)
    if variant is Variant.INEQUALITY:
        gamma = max(gamma, 0.0)
    x = candidate_x(y, gamma)
    return ProjectionResult(x=x, gamma=gamma, iterations=iters,
                            feasibility_gap=feasibility_gap(x, k, variant),
                            status=status, brackets=history)


def project(y, k: float, variant=Variant.INEQUALITY, config: NewtonConfig | None = None) -> np.ndarray:
    """Convenience wrapper returning only the projected vector."""
    return project_capped_simplex(ProjectionProblem(y, k, variant), config).x
