"""Projection onto the k-capped simplex and its use in Boolean-relaxed sparse regression."""

from .baselines import BreakpointProfile, project_bisection, project_exact_sort
from .core import (
    Bracket,
    DerivativePair,
    InfeasibleBracketError,
    InfeasibleInputError,
    NewtonConfig,
    ProjectionProblem,
    ProjectionResult,
    Status,
    Variant,
    candidate_x,
    eval_omega_derivatives,
    feasibility_gap,
    initial_bracket,
    project,
    project_capped_simplex,
)

__all__ = [
    "Bracket", "BreakpointProfile", "DerivativePair", "InfeasibleBracketError", "InfeasibleInputError",
    "NewtonConfig", "ProjectionProblem", "ProjectionResult", "Status", "Variant", "candidate_x",
    "eval_omega_derivatives", "feasibility_gap", "initial_bracket", "project", "project_bisection",
    "project_capped_simplex", "project_exact_sort",
]
