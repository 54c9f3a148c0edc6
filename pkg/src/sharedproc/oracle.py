"""Global optimum of small instances by enumerating synchronized schedules.

Some optimal schedule is synchronized, so trying every ordered subset of jobs
with every non-increasing width sequence finds the optimum.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb, perm
from typing import Iterator, List, Optional, Tuple


from ._numbers import Number, from_mpq, to_mpq
from .core import Instance, SynchronizedSchedule
from .errors import BudgetExceeded

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnumerationBudget:
    max_jobs: int = 6
    max_machines: int = 4
    max_candidates: int = 5_000_000

    def __post_init__(self):
        if min(self.max_jobs, self.max_machines, self.max_candidates) < 1:
            raise ValueError("budget limits must be positive")


def candidate_count(n: int, m: int) -> int:
    """Ordered job subsets times non-increasing width sequences over ``1..m``."""
    # non-increasing sequences of length k over m values: C(k + m - 1, k)
    return sum(perm(n, k) * comb(k + m - 1, k) for k in range(n + 1))


def _check_budget(instance: Instance, budget: EnumerationBudget) -> int:
    count = candidate_count(instance.n, instance.m)
    if instance.n > budget.max_jobs:
        raise BudgetExceeded(f"n = {instance.n} exceeds the oracle limit of {budget.max_jobs} jobs")
    if instance.m > budget.max_machines:
        raise BudgetExceeded(f"m = {instance.m} exceeds the oracle limit of {budget.max_machines} machines")
    if count > budget.max_candidates:
        raise BudgetExceeded(f"{count} candidates exceed the limit of {budget.max_candidates}")
    return count


def _walk(instance: Instance, skip_infeasible: bool):
    """Depth-first over (sequence, boundaries, objective) in native arithmetic.

    Exact instances run on mpq, float ones on float.
    """
    exact = instance.exact
    conv = to_mpq if exact else float
    tol = 0 if exact else instance.tol
    p = [conv(j.p) for j in instance.jobs]
    w = [conv(j.w) for j in instance.jobs]
    prefix = [conv(0)]
    for c in instance.costs:
        prefix.append(prefix[-1] + conv(c))
    n, m = instance.n, instance.m

    seq: List[Tuple[int, int]] = []
    times = [conv(0)]
    used = [False] * n

    def rec(max_width: int, value):
        yield seq, times, value
        t_prev = times[-1]
        for j in range(n):
            if used[j]:
                continue
            if skip_infeasible and p[j] < t_prev - tol:
                continue
            used[j] = True
            for width in range(1, max_width + 1):
                t = (p[j] + width * t_prev) / (1 + width)
                seq.append((j, width))
                times.append(t)
                yield from rec(width, value + (t - t_prev) * (width * w[j] - prefix[width]))
                seq.pop()
                times.pop()
            used[j] = False

    return rec(m, conv(0))


def _to_sync(instance: Instance, seq, times) -> SynchronizedSchedule:
    ids = instance.ids
    if instance.exact:
        bounds = tuple(from_mpq(t) for t in times)
    else:
        bounds = tuple(float(t) for t in times)
    return SynchronizedSchedule(tuple((ids[j], width) for j, width in seq), bounds)


def enumerate_synchronized(
    instance: Instance,
    budget: Optional[EnumerationBudget] = None,
    skip_infeasible: bool = True,
) -> Iterator[SynchronizedSchedule]:
    """Every synchronized candidate; with ``skip_infeasible`` the ones with ``t_i < t_{i-1}`` are left out."""
    _check_budget(instance, budget or EnumerationBudget())
    for seq, times, _ in _walk(instance, skip_infeasible):
        yield _to_sync(instance, seq, times)


@dataclass(frozen=True)
class OracleResult:
    schedule: SynchronizedSchedule
    objective: Number
    candidates: int


def oracle_optimum(instance: Instance, budget: Optional[EnumerationBudget] = None) -> OracleResult:
    """Best synchronized schedule.

    Ties prefer the shorter sequence, then smaller job positions, then smaller widths.
    """
    _check_budget(instance, budget or EnumerationBudget())
    tol = instance.tol
    best_value = None
    best_key = None
    best = None
    seen = 0
    for seq, times, value in _walk(instance, skip_infeasible=True):
        seen += 1
        if best_value is not None and value < best_value - tol:
            continue
        key = (len(seq), tuple(j for j, _ in seq), tuple(w for _, w in seq))
        if best_value is None or value > best_value + tol or key < best_key:
            best_value, best_key, best = value, key, (list(seq), list(times))
    objective = from_mpq(best_value) if instance.exact else float(best_value)
    logger.debug("oracle scanned %d candidates", seen)
    return OracleResult(_to_sync(instance, *best), objective, seen)
