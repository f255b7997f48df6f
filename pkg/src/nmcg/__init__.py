"""Non-monotone conjugate gradient method with a trigonometric non-monotone parameter."""

from .core import CountingProblem, DifferentiableProblem, EvalCounters, EvaluationError, check_gradient
from .problems import make_problem, problem_names
from .solver import LineSearchFailure, SolverConfig, SolverReport, Status, minimize

__all__ = [
    "CountingProblem",
    "DifferentiableProblem",
    "EvalCounters",
    "EvaluationError",
    "LineSearchFailure",
    "SolverConfig",
    "SolverReport",
    "Status",
    "check_gradient",
    "make_problem",
    "minimize",
    "problem_names",
]
