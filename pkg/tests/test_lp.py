import random
from fractions import Fraction

import pytest

from sharedproc import simplex
from sharedproc.core import Instance, payoff, validate
from sharedproc.errors import NotAntithetical, TooManyJobs
from sharedproc.fuzz import random_antithetical_instance, random_feasible_schedule, random_instance
from sharedproc.lp import (build_compatible_lp, encode_schedule, extract_schedule, is_antithetical,
                           processing_time_order, solve_antithetical, solve_exact, solve_lp)


def test_smallest_model_shape(single):
    model = build_compatible_lp(single, ["a"])
    assert model.program.names == ("t_1", "x_1_1_1")
    assert [r.name for r in model.program.rows] == ["chain_1", "cap_1_1", "done_1"]


@pytest.mark.parametrize("n,m", [(1, 1), (2, 1), (3, 2), (4, 3)])
def test_variable_count(n, m):
    inst = Instance.create([(j, j + 1, 1) for j in range(n)], [0] * m)
    model = build_compatible_lp(inst, inst.ids)
    assert model.n_variables == n + n * m * (n + 1) // 2


def test_permutation_must_be_a_bijection(d1):
    with pytest.raises(ValueError):
        build_compatible_lp(d1, [1, 1])
    with pytest.raises(ValueError):
        build_compatible_lp(d1, [1])


def test_single_job_lp(single):
    model = build_compatible_lp(single, ["a"])
    sol = solve_lp(model)
    assert sol.objective == 6
    assert sol.t(model, 1) == 6 and sol.x(model, 1, 1, 1) == 6
    s = extract_schedule(sol, model)
    assert s.private_completion == {"a": 6}
    assert [(pc.start, pc.end) for pc in s.pieces] == [(0, 6)]


def test_d1_permutations(d1):
    assert solve_lp(build_compatible_lp(d1, [1, 2])).objective == 7
    assert solve_lp(build_compatible_lp(d1, [2, 1])).objective == 4


def test_nonpositive_gains_give_zero():
    inst = Instance.create([(1, 5, 1), (2, 7, 1)], [2, 3])
    res = solve_exact(inst)
    assert res.objective == 0
    assert res.schedule.pieces == ()
    # a gain of exactly zero may or may not be used, the payoff is zero either way
    assert solve_exact(Instance.create([(1, 5, 1), (2, 7, 2)], [2, 3])).objective == 0


def test_exact_named_instances(d1, two_machine, single):
    assert solve_exact(d1).objective == 7
    assert solve_exact(two_machine).objective == 37
    assert solve_exact(single).objective == 6
    assert solve_exact(Instance.create([(1, 5, 1)], [2])).objective == 0


def test_exact_refuses_large_instances():
    inst = Instance.create([(j, j + 1, 1) for j in range(9)], [0])
    with pytest.raises(TooManyJobs, match="8"):
        solve_exact(inst)


def test_some_orders_are_infeasible():
    # job 1 must finish privately before job 2 but is longer than all of job 2
    inst = Instance.create([(1, 10, 1), (2, 2, 1)], [0])
    assert solve_lp(build_compatible_lp(inst, [1, 2])).status == simplex.INFEASIBLE
    res = solve_exact(inst)
    assert res.infeasible == 1 and res.permutation == (2, 1)


def test_antithetical_detection(d1, two_machine):
    assert is_antithetical(d1)
    assert not is_antithetical(two_machine)
    assert is_antithetical(Instance.create([(1, 3, 2), (2, 3, 2)], [1]))


def test_antithetical_solver(d1, single, two_machine):
    res = solve_antithetical(d1)
    assert res.objective == 7
    assert {pc.job for pc in res.schedule.pieces} == {1, 2}
    assert solve_antithetical(single).objective == 6
    twins = Instance.create([(1, 3, 2), (2, 3, 2)], [1])
    assert solve_antithetical(twins).objective == solve_lp(build_compatible_lp(twins, [2, 1])).objective
    with pytest.raises(NotAntithetical):
        solve_antithetical(two_machine)


def test_processing_time_order_tie_break():
    inst = Instance.create([(1, 5, 1), (2, 5, 3), (3, 2, 4), (4, 5, 3)], [0])
    assert processing_time_order(inst) == (3, 2, 4, 1)


@pytest.mark.parametrize("seed", range(30))
def test_extracted_schedules_are_feasible_and_compatible(seed):
    inst = random_instance(random.Random(seed))
    perm = list(inst.ids)
    random.Random(seed + 1000).shuffle(perm)
    model = build_compatible_lp(inst, perm)
    sol = solve_lp(model)
    if sol.status != simplex.OPTIMAL:
        return
    s = extract_schedule(sol, model)
    assert validate(s, inst) == []
    completions = [s.private_completion[j] for j in perm]
    assert completions == sorted(completions)
    assert payoff(s, inst) == sol.objective


@pytest.mark.parametrize("seed", range(30))
def test_encoding_feasible_schedules(seed):
    inst, s = random_feasible_schedule(random.Random(seed))
    perm = sorted(inst.ids, key=lambda j: (s.private_completion[j], inst.position(j)))
    model = build_compatible_lp(inst, perm)
    values = encode_schedule(s, model)
    assert model.program.violations(values) == []
    assert model.program.evaluate(values) == payoff(s, inst)


@pytest.mark.parametrize("seed", range(10))
def test_expensive_machine_changes_nothing(seed):
    inst = random_instance(random.Random(seed), max_machines=2)
    top = max([j.w for j in inst.jobs] + list(inst.costs)) + 1
    wider = Instance.create([(j.id, j.p, j.w) for j in inst.jobs], list(inst.costs) + [top])
    assert solve_exact(wider).objective == solve_exact(inst).objective


@pytest.mark.parametrize("seed", range(10))
def test_antithetical_matches_exact(seed):
    inst = random_antithetical_instance(random.Random(seed))
    assert solve_antithetical(inst).objective == solve_exact(inst).objective


def test_lp_text_dump(d1):
    text = build_compatible_lp(d1, [1, 2]).program.to_lp_text()
    assert text.splitlines()[1] == "Maximize"
    assert " done_2: 1 t_2 + 1 x_2_1_1 + 1 x_2_1_2 = 8" in text
    assert text.rstrip().endswith("End")


def test_float_mode_agrees(two_machine):
    assert abs(solve_exact(two_machine.to_float()).objective - 37) <= 1e-6
    inst = Instance.create([(1, Fraction(7, 3), Fraction(5, 2)), (2, Fraction(11, 4), 1)], [Fraction(1, 3)])
    assert abs(float(solve_exact(inst).objective) - solve_exact(inst.to_float()).objective) <= 1e-6
