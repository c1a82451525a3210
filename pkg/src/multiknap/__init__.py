"""Exact and approximate solvers for the multistage knapsack problem."""

from .core import (
    GuardError,
    Instance,
    ObjectiveBreakdown,
    Schedule,
    StructuralError,
    evaluate,
    is_feasible,
    object_reward,
)
from .exact import brute_force, dp_solve
from .approx import ptas_constant, ptas_general, round_lp
from .simplex import build_lp, count_fractional_objects, normalize_z, solve_basic, solve_relaxation

__all__ = [
    "GuardError",
    "Instance",
    "ObjectiveBreakdown",
    "Schedule",
    "StructuralError",
    "brute_force",
    "build_lp",
    "count_fractional_objects",
    "dp_solve",
    "evaluate",
    "is_feasible",
    "normalize_z",
    "object_reward",
    "ptas_constant",
    "ptas_general",
    "round_lp",
    "solve_basic",
    "solve_relaxation",
]
