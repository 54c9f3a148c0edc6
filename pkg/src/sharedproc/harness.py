"""Randomized property checks, shared by the ``fuzz`` command and the tests.

Each check draws its inputs from the given generator and raises
``InvariantBreach`` when an identity fails.  Checks that cannot build a
suitable input return ``False`` (skipped) and ``True`` on success.
"""
from __future__ import annotations

import random
from typing import Callable, Dict, List, Optional

from .alpha import alpha_of, solve_alpha
from .core import Instance, overlap_report, payoff, validate
from .errors import InvariantBreach
from .fuzz import (epsilon_between, random_antithetical_instance, random_feasible_schedule, random_instance,
                   random_sequential_schedule)
from .lp import solve_antithetical, solve_exact
from .oracle import oracle_optimum
from .structure import (apply_modification, check_xi_valid, describe_intervals, is_processor_descending,
                        is_sequential, layout, modification_bound, rightmost_split, transfer, transfer_bounds)


def _require(ok: bool, message: str) -> None:
    if not ok:
        raise InvariantBreach(message)


def expected_epsilons(schedule, instance: Instance, t, epsilon) -> List:
    """``eps * prod m_z / m^+_{z-1}`` along the suffix starting at ``t``, from the descriptors."""
    descs = describe_intervals(schedule, instance)
    k = next(i for i, d in enumerate(descs) if d.end == t)
    out = [epsilon]
    for prev, cur in zip(descs[k:], descs[k + 1:]):
        out.append(out[-1] * cur.width / prev.factor)
    return out


def check_solvers(instance: Instance) -> bool:
    opt = oracle_optimum(instance).objective
    exact = solve_exact(instance).objective
    _require(exact == opt, f"exact search {exact} differs from the oracle {opt}")
    approx = solve_alpha(instance).objective
    _require(approx >= alpha_of(instance.m) * opt, f"alpha schedule {approx} below alpha * {opt}")
    return True


def check_antithetical(instance: Instance) -> bool:
    opt = oracle_optimum(instance).objective
    got = solve_antithetical(instance).objective
    _require(got == opt, f"antithetical solver {got} differs from the oracle {opt}")
    return True


def check_make_sequential(rng: random.Random, n=None, m=None) -> bool:
    from .structure import make_sequential

    instance, schedule = random_feasible_schedule(rng, n, m)
    out = make_sequential(schedule, instance)
    _require(not validate(out, instance), "sequential form is infeasible")
    _require(is_sequential(out) and is_processor_descending(out, instance.m), "output is not in sequential form")
    _require(payoff(out, instance) == payoff(schedule, instance), "payoff changed")
    return True


def check_modification(rng: random.Random, n=None, m=None) -> bool:
    instance, schedule = random_sequential_schedule(rng, n, m, splits=rng.randint(0, 2))
    t = rng.choice([iv.end for iv in layout(schedule, instance)])
    eps = epsilon_between(rng, modification_bound(schedule, instance, t))
    trace = apply_modification(schedule, instance, t, eps)
    _require(list(trace.epsilons) == expected_epsilons(schedule, instance, t, eps), "epsilon product formula")
    _require(trace.delta == eps * trace.rate, "sum of step payoffs differs from eps * rate")
    # the first job deliberately gains epsilon work, so the result is scored without the feasibility check
    _require(overlap_report(trace.schedule, instance).total_weighted - payoff(schedule, instance) == trace.delta,
             "payoff change")
    failures = check_xi_valid(trace, schedule, instance)
    _require(not failures, "; ".join(failures))
    return True


def check_transfer(rng: random.Random, n=None, m=None) -> bool:
    instance, schedule = random_sequential_schedule(rng, n, m, splits=2)
    split = rightmost_split(schedule, instance)
    if split is None:
        return False
    neg, _ = transfer_bounds(schedule, instance, split)
    out = transfer(schedule, instance, epsilon_between(rng, neg, negative=True), split)
    _require(out.after - out.before == out.predicted, "transfer payoff identity")
    _require(out.schedule.shared_makespan < schedule.shared_makespan, "makespan did not drop")
    return True


CHECKS: Dict[str, Callable] = {
    "solvers": lambda rng, n, m: check_solvers(random_instance(rng, n, m)),
    "antithetical": lambda rng, n, m: check_antithetical(random_antithetical_instance(rng, n, m)),
    "make-sequential": check_make_sequential,
    "modification": check_modification,
    "transfer": check_transfer,
}


def run_checks(seed: int, count: int, n: Optional[int] = None, m: Optional[int] = None,
               names=None) -> Dict[str, Dict[str, int]]:
    """Run every named check ``count`` times from one seed; returns pass/skip counts."""
    rng = random.Random(seed)
    results = {}
    for name in names or CHECKS:
        passed = skipped = 0
        for _ in range(count):
            if CHECKS[name](rng, n, m):
                passed += 1
            else:
                skipped += 1
        results[name] = {"passed": passed, "skipped": skipped}
    return results
