"""Reference solvers for the same scalar root problem.

``project_exact_sort`` locates the root of the piecewise-linear omega' by
sorting its 2n breakpoints and solving the affine equation on the segment
that changes sign. ``project_bisection`` is plain interval halving on the
monotone omega'. Neither shares iteration logic with the Newton solver, so
both serve as independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import clipped_sum_and_count, compensated_sum
from .core import (
    ProjectionProblem,
    ProjectionResult,
    Status,
    Variant,
    candidate_x,
    feasibility_gap,
    initial_bracket,
)


@dataclass(frozen=True)
class BreakpointProfile:
    """Sorted breakpoints {y_i - 1} u {y_i} plus prefix sums over sorted y.

    For gamma strictly inside a segment, with ``a = #{y_i <= gamma}`` and
    ``b = #{y_i < gamma + 1}``, the active set is S = sorted indices [a, b),
    S1 = [b, n), and sum(x(gamma)) = (n - b) + sum(y_S) - (b - a) * gamma.
    """

    breakpoints: np.ndarray
    y_sorted: np.ndarray
    prefix_sums: np.ndarray

    @classmethod
    def build(cls, y) -> "BreakpointProfile":
        ys = np.sort(np.asarray(y, dtype=np.float64))
        # two already-sorted runs: the stable (tim)sort merges them in linear time
        bp = np.sort(np.concatenate((ys - 1.0, ys)), kind="stable")
        prefix = np.concatenate(([0.0], np.cumsum(ys)))
        return cls(breakpoints=bp, y_sorted=ys, prefix_sums=prefix)

    @property
    def n(self) -> int:
        return self.y_sorted.shape[0]

    def segment_sets(self, gamma: float) -> tuple[int, int]:
        a = int(np.searchsorted(self.y_sorted, gamma, side="right"))
        b = int(np.searchsorted(self.y_sorted, gamma + 1.0, side="left"))
        return a, max(a, b)

    def sum_x(self, gamma: float) -> float:
        a, b = self.segment_sets(gamma)
        return (self.n - b) + (self.prefix_sums[b] - self.prefix_sums[a]) - (b - a) * gamma

    def omega_prime(self, gamma: float, k: float) -> float:
        return k - self.sum_x(gamma)

    def root(self, k: float) -> tuple[float, bool]:
        """Root of omega' for this profile; returns (gamma, found)."""
        bp = self.breakpoints
        m = bp.shape[0]
        # first breakpoint with omega' >= 0, by binary search on the monotone values
        lo, hi = 0, m
        while lo < hi:
            mid = (lo + hi) // 2
            if self.omega_prime(float(bp[mid]), k) >= 0:
                hi = mid
            else:
                lo = mid + 1
        j = lo
        if j == m:
            return math.nan, False
        right = float(bp[j])
        if self.omega_prime(right, k) == 0.0:
            # flat zero stretches resolve to their left endpoint
            return right, True
        if j == 0:
            # omega' > 0 everywhere; only reachable for k > n
            return math.nan, False
        left = float(bp[j - 1])
        if left == right:
            return right, True
        a, b = self.segment_sets(0.5 * (left + right))
        size = b - a
        if size == 0:
            return left, True
        sum_s = compensated_sum(self.y_sorted[a:b])
        gamma = ((self.n - b) + sum_s - k) / size
        return min(max(gamma, left), right), True


def _finish(problem: ProjectionProblem, gamma: float, iterations: int, status: Status) -> ProjectionResult:
    if problem.variant is Variant.INEQUALITY:
        gamma = max(gamma, 0.0)
    x = candidate_x(problem.y, gamma)
    return ProjectionResult(x=x, gamma=gamma, iterations=iterations,
                            feasibility_gap=feasibility_gap(x, problem.k, problem.variant),
                            status=status)


def _short_circuit(problem: ProjectionProblem) -> ProjectionResult | None:
    """Handle saturated caps and an inactive inequality cap; None if a root search is needed."""
    y, k, n = problem.y, problem.k, problem.n
    if k == 0.0:
        x = candidate_x(y, math.inf)
        return ProjectionResult(x=x, gamma=math.inf, iterations=0,
                                feasibility_gap=feasibility_gap(x, k, problem.variant),
                                status=Status.CONVERGED, saturated=1)
    if problem.variant is Variant.INEQUALITY:
        x0 = candidate_x(y, 0.0)
        if compensated_sum(x0) <= k:
            return ProjectionResult(x=x0, gamma=0.0, iterations=0,
                                    feasibility_gap=feasibility_gap(x0, k, problem.variant),
                                    status=Status.CONVERGED)
    elif k == n:
        x = candidate_x(y, -math.inf)
        return ProjectionResult(x=x, gamma=-math.inf, iterations=0,
                                feasibility_gap=feasibility_gap(x, k, problem.variant),
                                status=Status.CONVERGED, saturated=-1)
    return None


def project_exact_sort(problem: ProjectionProblem) -> ProjectionResult:
    problem.check()
    done = _short_circuit(problem)
    if done is not None:
        return done
    gamma, found = BreakpointProfile.build(problem.y).root(problem.k)
    if not found:
        x = np.full(problem.n, math.nan)
        return ProjectionResult(x=x, gamma=math.nan, iterations=0,
                                feasibility_gap=math.nan, status=Status.NO_ROOT)
    return _finish(problem, gamma, 0, Status.CONVERGED)


def project_bisection(problem: ProjectionProblem, tol: float = 1e-14, max_iters: int = 2000) -> ProjectionResult:
    """Halve [min(y) - 1, max(y)] until its width is <= tol (or stops shrinking in floating point)."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    problem.check()
    done = _short_circuit(problem)
    if done is not None:
        return done
    y, k = problem.y, problem.k
    br = initial_bracket(y, k)
    lo, hi = br.lo, br.hi
    it = 0
    while hi - lo > tol and it < max_iters:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        total, _ = clipped_sum_and_count(y, mid)
        if k - total < 0:
            lo = mid
        else:
            hi = mid
        it += 1
    status = Status.CONVERGED if it < max_iters else Status.MAX_ITERS
    return _finish(problem, 0.5 * (lo + hi), it, status)
