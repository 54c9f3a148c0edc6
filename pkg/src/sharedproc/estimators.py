"""Estimator-style wrappers and the solver dispatch shared with the CLI.

Solvers follow the fit/predict shape: ``fit(instance)`` computes a schedule
and stores it as ``schedule_`` with its payoff in ``objective_``.  The two
schedule transformations are transformers fitted on the instance they refer to.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import alpha as alpha_mod
from .core import Instance, Schedule, expand, payoff, validate
from .core import InfeasibleScheduleError
from .errors import TransformError
from .io import instance_from_dict, schedule_from_dict
from .lp import solve_antithetical, solve_exact
from .oracle import EnumerationBudget, oracle_optimum
from .structure import canonicalize, make_sequential, relabel_gain

SOLVERS = ("exact", "oracle", "alpha-lp", "alpha-flow", "antithetical")
ARITHMETIC = ("exact", "float")


def check_arithmetic(arithmetic: str) -> str:
    if arithmetic not in ARITHMETIC:
        raise ValueError(f"arithmetic must be one of {ARITHMETIC}, got {arithmetic!r}")
    return arithmetic


def check_instance(instance, arithmetic: Optional[str] = None) -> Instance:
    """Accept an ``Instance`` or its JSON-shaped dict; convert to the requested arithmetic."""
    if isinstance(instance, Mapping):
        instance, _ = instance_from_dict(instance)
    if not isinstance(instance, Instance):
        raise TypeError(f"expected an Instance or an instance dict, got {type(instance).__name__}")
    if arithmetic is None:
        return instance
    check_arithmetic(arithmetic)
    if arithmetic == "float":
        return instance if not instance.exact else instance.to_float()
    return instance if instance.exact else instance.to_exact()


def check_schedule(schedule, instance: Instance) -> Schedule:
    """Accept a ``Schedule`` or schedule dict and insist it is feasible."""
    if isinstance(schedule, Mapping):
        schedule = schedule_from_dict(schedule, instance)
    if not isinstance(schedule, Schedule):
        raise TypeError(f"expected a Schedule or a schedule dict, got {type(schedule).__name__}")
    problems = validate(schedule, instance)
    if problems:
        raise InfeasibleScheduleError(problems)
    return schedule


@dataclass(frozen=True)
class SolveReport:
    solver: str
    arithmetic: str
    schedule: Schedule
    objective: object
    alpha: object = None
    capacity: Optional[str] = None
    detail: Optional[dict] = None


def solve(instance: Instance, solver: str = "exact", arithmetic: str = "exact",
          paper_flow_capacity: bool = False, max_jobs: int = 8,
          budget: Optional[EnumerationBudget] = None) -> SolveReport:
    if solver not in SOLVERS:
        raise ValueError(f"solver must be one of {SOLVERS}, got {solver!r}")
    if paper_flow_capacity and solver != "alpha-flow":
        raise ValueError("the paper-literal capacity only applies to the alpha-flow solver")
    instance = check_instance(instance, arithmetic)
    if solver == "exact":
        res = solve_exact(instance, max_jobs=max_jobs)
        return SolveReport(solver, arithmetic, res.schedule, res.objective,
                           detail={"permutation": list(res.permutation), "orders": res.solved,
                                   "infeasible_orders": res.infeasible})
    if solver == "antithetical":
        res = solve_antithetical(instance)
        return SolveReport(solver, arithmetic, res.schedule, res.objective,
                           detail={"permutation": list(res.permutation)})
    if solver == "oracle":
        res = oracle_optimum(instance, budget)
        return SolveReport(solver, arithmetic, expand(res.schedule, instance), res.objective,
                           detail={"sequence": [[j, w] for j, w in res.schedule.sequence],
                                   "candidates": res.candidates})
    backend = "lp" if solver == "alpha-lp" else "flow"
    res = alpha_mod.solve_alpha(instance, backend=backend, paper_capacity=paper_flow_capacity)
    return SolveReport(solver, arithmetic, res.schedule, res.objective, alpha=res.alpha, capacity=res.capacity)


class ScheduleSolver(BaseEstimator):
    """Maximize total weighted overlap with one of the available solvers.

    ``predict`` returns the fitted schedule; ``score`` its payoff, or the payoff
    of a given schedule.
    """

    def __init__(self, solver="exact", arithmetic="exact", paper_flow_capacity=False, max_jobs=8):
        self.solver = solver
        self.arithmetic = arithmetic
        self.paper_flow_capacity = paper_flow_capacity
        self.max_jobs = max_jobs

    def fit(self, X, y=None):
        self.instance_ = check_instance(X, self.arithmetic)
        report = solve(self.instance_, self.solver, self.arithmetic,
                       paper_flow_capacity=self.paper_flow_capacity, max_jobs=self.max_jobs)
        self.report_ = report
        self.schedule_ = report.schedule
        self.objective_ = report.objective
        return self

    def predict(self, X=None):
        check_is_fitted(self, "schedule_")
        if X is not None and check_instance(X, self.arithmetic) != self.instance_:
            return self.fit(X).schedule_
        return self.schedule_

    def fit_predict(self, X, y=None):
        return self.fit(X).schedule_

    def score(self, X=None, y=None):
        check_is_fitted(self, "schedule_")
        if y is None:
            return self.objective_
        return payoff(check_schedule(y, self.instance_), self.instance_)


class _ScheduleTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        self.instance_ = check_instance(X)
        return self

    def _input(self, schedule) -> Schedule:
        check_is_fitted(self, "instance_")
        return check_schedule(schedule, self.instance_)

    def fit_transform(self, X, y=None, **fit_params):
        if y is None:
            raise TransformError("fit_transform needs the instance as X and the schedule as y")
        return self.fit(X).transform(y)


class SequentialTransformer(_ScheduleTransformer):
    """Rearrange a feasible schedule into sequential, processor-descending form.

    ``gain_`` records the payoff change of the last call; it is zero unless
    the busiest processors were not the cheapest ones.
    """

    def transform(self, X):
        schedule = self._input(X)
        self.gain_ = relabel_gain(schedule, self.instance_)
        return make_sequential(schedule, self.instance_)


class Canonicalizer(_ScheduleTransformer):
    """Best-effort move towards a synchronized schedule without losing payoff."""

    def __init__(self, max_steps=200):
        self.max_steps = max_steps

    def transform(self, X):
        result = canonicalize(self._input(X), self.instance_, max_steps=self.max_steps)
        self.converged_ = result.converged
        self.log_ = result.log
        return result.schedule
