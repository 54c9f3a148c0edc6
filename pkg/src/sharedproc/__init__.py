"""Shared-processor scheduling: solvers, oracle and schedule transformations."""
from .alpha import alpha_of, solve_alpha
from .core import (Instance, InfeasibleScheduleError, Job, Piece, Schedule, SynchronizedSchedule, expand, payoff,
                   synchronized_objective, total_weighted_overlap, validate)
from .errors import InvariantBreach, SolverRefusal, TransformError
from .estimators import Canonicalizer, ScheduleSolver, SequentialTransformer, solve
from .lp import solve_antithetical, solve_exact
from .oracle import oracle_optimum

__version__ = "0.1.0"

__all__ = [
    "Instance", "Job", "Piece", "Schedule", "SynchronizedSchedule", "InfeasibleScheduleError",
    "InvariantBreach", "SolverRefusal", "TransformError",
    "validate", "payoff", "total_weighted_overlap", "expand", "synchronized_objective",
    "solve_exact", "solve_antithetical", "oracle_optimum", "solve_alpha", "alpha_of", "solve",
    "ScheduleSolver", "SequentialTransformer", "Canonicalizer",
]
