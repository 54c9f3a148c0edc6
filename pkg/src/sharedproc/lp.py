"""Permutation-constrained LP, its schedule extraction and exact search.

For a permutation ``A`` of the jobs, the LP below finds the best schedule in
which private completions follow ``A``::

    max   sum (w_j - c_i) x_jik
    s.t.  0 = t_0 <= t_1 <= ... <= t_n
          sum_{j >= k} x_jik <= t_k - t_{k-1}        for every machine i, window k
          sum_{i, k <= j} x_jik = p_j - t_j           for every position j
          x >= 0

``x_jik`` is the amount of the ``j``-th job of ``A`` on machine ``i`` inside
window ``(t_{k-1}, t_k)``.  Maximizing over all permutations gives the global
optimum since some optimal schedule is synchronized.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import simplex
from ._numbers import Number, as_float_text
from .core import Instance, JobId, Piece, Schedule
from .errors import NotAntithetical, TooManyJobs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Row:
    name: str
    family: str
    coeffs: Dict[int, Number]
    sense: str
    rhs: Number


@dataclass(frozen=True)
class LinearProgram:
    """Maximization LP over non-negative named columns."""

    names: Tuple[str, ...]
    objective: Dict[int, Number]
    rows: Tuple[Row, ...]
    exact: bool

    def evaluate(self, values: Sequence[Number]) -> Number:
        zero = Fraction(0) if self.exact else 0.0
        return sum((c * values[k] for k, c in self.objective.items()), zero)

    def violations(self, values: Sequence[Number], tol=None) -> List[str]:
        """Names of rows (and ``x>=0`` bounds) that ``values`` breaks."""
        if tol is None:
            tol = 0 if self.exact else 1e-9
        bad = [self.names[k] + ">=0" for k, v in enumerate(values) if v < -tol]
        for row in self.rows:
            lhs = sum((c * values[k] for k, c in row.coeffs.items()), 0 * row.rhs)
            if row.sense == "<=" and lhs > row.rhs + tol:
                bad.append(row.name)
            elif row.sense == ">=" and lhs < row.rhs - tol:
                bad.append(row.name)
            elif row.sense == "=" and abs(lhs - row.rhs) > tol:
                bad.append(row.name)
        return bad

    def solve(self) -> simplex.SimplexResult:
        return simplex.maximize(self.objective, [(r.coeffs, r.sense, r.rhs) for r in self.rows],
                                len(self.names), exact=self.exact)

    def to_lp_text(self) -> str:
        """CPLEX LP text, for cross-checking with external solvers."""

        def expr(coeffs):
            parts = []
            for k, c in sorted(coeffs.items()):
                if c == 0:
                    continue
                sign = "-" if c < 0 else "+"
                parts.append(f"{sign} {as_float_text(abs(c))} {self.names[k]}")
            text = " ".join(parts) or "0 " + self.names[0]
            return text[2:] if text.startswith("+ ") else text

        lines = ["\\ generated by sharedproc", "Maximize", " obj: " + expr(self.objective), "Subject To"]
        for row in self.rows:
            lines.append(f" {row.name}: {expr(row.coeffs)} {row.sense} {as_float_text(row.rhs)}")
        lines += ["Bounds"] + [f" {name} >= 0" for name in self.names] + ["End", ""]
        return "\n".join(lines)


@dataclass(frozen=True)
class LpModel:
    instance: Instance
    permutation: Tuple[JobId, ...]
    program: LinearProgram
    t_index: Tuple[int, ...]
    x_index: Dict[Tuple[int, int, int], int]

    @property
    def n_variables(self) -> int:
        return len(self.program.names)


@dataclass(frozen=True)
class LpSolution:
    status: str
    objective: Optional[Number]
    values: Tuple[Number, ...] = ()

    def t(self, model: LpModel, position: int) -> Number:
        return self.values[model.t_index[position - 1]]

    def x(self, model: LpModel, position: int, machine: int, window: int) -> Number:
        return self.values[model.x_index[(position, machine, window)]]


def _check_permutation(instance: Instance, permutation) -> Tuple[JobId, ...]:
    perm = tuple(permutation)
    if len(perm) != instance.n or set(perm) != set(instance.ids) or len(set(perm)) != len(perm):
        raise ValueError(f"permutation {perm!r} is not a bijection over the job ids")
    return perm


def build_compatible_lp(instance: Instance, permutation) -> LpModel:
    perm = _check_permutation(instance, permutation)
    n, m = instance.n, instance.m
    zero = instance._zero()
    names: List[str] = [f"t_{j}" for j in range(1, n + 1)]
    x_index: Dict[Tuple[int, int, int], int] = {}
    for j in range(1, n + 1):
        for i in range(1, m + 1):
            for k in range(1, j + 1):
                x_index[(j, i, k)] = len(names)
                names.append(f"x_{j}_{i}_{k}")
    t_index = tuple(range(n))

    rows: List[Row] = []
    for k in range(1, n + 1):
        coeffs = {t_index[k - 1]: 1}
        if k > 1:
            coeffs[t_index[k - 2]] = -1
        rows.append(Row(f"chain_{k}", "chain", coeffs, ">=", zero))
    for i in range(1, m + 1):
        for k in range(1, n + 1):
            coeffs = {x_index[(j, i, k)]: 1 for j in range(k, n + 1)}
            coeffs[t_index[k - 1]] = -1
            if k > 1:
                coeffs[t_index[k - 2]] = 1
            rows.append(Row(f"cap_{i}_{k}", "capacity", coeffs, "<=", zero))
    for j in range(1, n + 1):
        coeffs = {x_index[(j, i, k)]: 1 for i in range(1, m + 1) for k in range(1, j + 1)}
        coeffs[t_index[j - 1]] = 1
        rows.append(Row(f"done_{j}", "completion", coeffs, "=", instance.job(perm[j - 1]).p))

    objective = {}
    for (j, i, k), col in x_index.items():
        coef = instance.job(perm[j - 1]).w - instance.cost(i)
        if coef != 0:
            objective[col] = coef
    program = LinearProgram(tuple(names), objective, tuple(rows), instance.exact)
    return LpModel(instance, perm, program, t_index, x_index)


def solve_lp(model: LpModel) -> LpSolution:
    res = model.program.solve()
    if res.status != simplex.OPTIMAL:
        return LpSolution(res.status, None, ())
    inst = model.instance
    bound = sum(j.p for j in inst.jobs) * max(j.w for j in inst.jobs) * inst.m
    assert res.objective <= bound + inst.tol, "LP objective exceeds the trivial payoff bound"
    return LpSolution(res.status, res.objective, tuple(res.values))


def pack_windows(instance: Instance, order: Sequence[JobId], windows, amounts, completion) -> Schedule:
    """Lay out ``amounts[(position, machine, window)]`` left to right inside each window.

    ``windows[k-1]`` is the ``(start, end)`` of window ``k``; jobs are packed
    in ``order`` (position ascending).
    """
    pieces = []
    for i in range(1, instance.m + 1):
        for k, (lo, hi) in enumerate(windows, start=1):
            cursor = lo
            for j in range(k, len(order) + 1):
                amount = amounts.get((j, i, k), 0)
                if amount > 0:
                    pieces.append(Piece(order[j - 1], i, cursor, cursor + amount))
                    cursor = cursor + amount
    return Schedule(completion, tuple(pieces))


def extract_schedule(solution: LpSolution, model: LpModel) -> Schedule:
    if solution.status != simplex.OPTIMAL:
        raise ValueError(f"cannot extract a schedule from a {solution.status} LP")
    n = model.instance.n
    t = [solution.t(model, j) for j in range(1, n + 1)]
    zero = model.instance._zero()
    windows = list(zip([zero] + t[:-1], t))
    amounts = {key: solution.values[col] for key, col in model.x_index.items()}
    completion = {model.permutation[j]: t[j] for j in range(n)}
    return pack_windows(model.instance, model.permutation, windows, amounts, completion)


def encode_schedule(schedule: Schedule, model: LpModel) -> List[Number]:
    """LP point of a feasible schedule whose private completions follow the permutation."""
    inst, perm = model.instance, model.permutation
    zero = inst._zero()
    values = [zero] * model.n_variables
    t = [schedule.private_completion[job] for job in perm]
    for j, tj in enumerate(t, start=1):
        values[model.t_index[j - 1]] = tj
    bounds = [zero] + t
    pos = {job: j for j, job in enumerate(perm, start=1)}
    for pc in schedule.pieces:
        j = pos[pc.job]
        for k in range(1, len(perm) + 1):
            common = min(pc.end, bounds[k]) - max(pc.start, bounds[k - 1])
            if common > 0:
                key = (j, pc.machine, k)
                if key not in model.x_index:
                    raise ValueError(f"{pc.job!r} runs after its private completion window")
                values[model.x_index[key]] += common
    return values


@dataclass(frozen=True)
class ExactResult:
    schedule: Schedule
    objective: Number
    permutation: Tuple[JobId, ...]
    solved: int
    infeasible: int


def solve_exact(instance: Instance, max_jobs: int = 8) -> ExactResult:
    """Best permutation LP over all ``n!`` orders.

    Ties go to the lexicographically smallest permutation (by instance order).
    Some orders admit no feasible schedule at all and are skipped.
    """
    if instance.n > max_jobs:
        raise TooManyJobs(f"exact search enumerates n! orders; n = {instance.n} exceeds the limit {max_jobs}")
    best: Optional[Tuple[Number, Tuple, LpModel, LpSolution]] = None
    solved = infeasible = 0
    for perm in itertools.permutations(instance.ids):
        model = build_compatible_lp(instance, perm)
        sol = solve_lp(model)
        solved += 1
        if sol.status != simplex.OPTIMAL:
            infeasible += 1
            continue
        if best is None or sol.objective > best[0] + instance.tol:
            best = (sol.objective, perm, model, sol)
    assert best is not None, "the processing-time order is always feasible"
    objective, perm, model, sol = best
    logger.debug("exact search: %d orders, %d infeasible, best %s", solved, infeasible, perm)
    return ExactResult(extract_schedule(sol, model), objective, perm, solved, infeasible)


def is_antithetical(instance: Instance) -> bool:
    """Whether ``p_a <= p_b`` implies ``w_a >= w_b`` for every pair of jobs."""
    jobs = instance.jobs
    return all(not (a.p <= b.p) or a.w >= b.w for a in jobs for b in jobs)


def processing_time_order(instance: Instance) -> Tuple[JobId, ...]:
    ranked = sorted(instance.jobs, key=lambda j: (j.p, -j.w, instance.position(j.id)))
    return tuple(j.id for j in ranked)


def solve_antithetical(instance: Instance) -> ExactResult:
    """One LP over the processing-time order; optimal for antithetical instances."""
    if not is_antithetical(instance):
        raise NotAntithetical("instance is not antithetical: some shorter job has a smaller weight")
    perm = processing_time_order(instance)
    model = build_compatible_lp(instance, perm)
    sol = solve_lp(model)
    if sol.status != simplex.OPTIMAL:
        raise RuntimeError(f"processing-time order LP is {sol.status}; this should not happen")
    return ExactResult(extract_schedule(sol, model), sol.objective, perm, 1, 0)
