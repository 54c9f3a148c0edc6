import json
import random
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sharedproc.alpha import alpha_of, solve_alpha
from sharedproc.core import Instance, Piece, Schedule, SynchronizedSchedule, expand, payoff, synchronized_objective
from sharedproc.core import validate
from sharedproc.fuzz import random_feasible_schedule, random_sequential_schedule
from sharedproc.io import schedule_from_dict, schedule_to_dict
from sharedproc.lp import solve_exact
from sharedproc.oracle import oracle_optimum
from sharedproc.structure import (apply_modification, check_xi_valid, find_segments, is_processor_descending,
                                  is_sequential, layout, make_sequential, modification_bound, relabel_gain)


def rationals(lo, hi):
    return st.builds(lambda k, d: Fraction(k, d), st.integers(lo * 4, hi * 4), st.just(4)) | st.builds(
        lambda k, d: Fraction(k, d), st.integers(lo * 3, hi * 3), st.just(3))


@st.composite
def instances(draw, max_jobs=4, max_machines=3):
    n = draw(st.integers(1, max_jobs))
    m = draw(st.integers(1, max_machines))
    jobs = [(j, draw(rationals(1, 20)), draw(rationals(0, 10))) for j in range(1, n + 1)]
    costs = sorted(draw(st.lists(rationals(0, 10), min_size=m, max_size=m)))
    return Instance.create(jobs, costs)


@st.composite
def synchronized(draw, inst):
    ids = draw(st.permutations(inst.ids))
    k = draw(st.integers(0, len(ids)))
    widths = sorted(draw(st.lists(st.integers(1, inst.m), min_size=k, max_size=k)), reverse=True)
    seq, t = [], Fraction(0)
    for j, w in zip(ids[:k], widths):
        if inst.job(j).p < t:
            continue
        seq.append((j, w))
        t = (inst.job(j).p + w * t) / (1 + w)
    return SynchronizedSchedule.from_sequence(inst, seq)


@given(st.data())
def test_synchronized_round_trip(data):
    inst = data.draw(instances())
    sync = data.draw(synchronized(inst))
    s = expand(sync, inst)
    assert validate(s, inst) == []
    assert synchronized_objective(sync, inst) == payoff(s, inst)


@settings(max_examples=40)
@given(instances(max_jobs=3))
def test_exact_search_equals_oracle(inst):
    assert solve_exact(inst).objective == oracle_optimum(inst).objective


@settings(max_examples=40)
@given(instances())
def test_alpha_guarantee_and_backends(inst):
    flow = solve_alpha(inst)
    assert flow.objective == solve_alpha(inst, backend="lp").objective
    assert flow.objective >= alpha_of(inst.m) * oracle_optimum(inst).objective


@given(st.integers(0, 10 ** 6))
def test_make_sequential_payoff(seed):
    rng = random.Random(seed)
    inst, s = random_feasible_schedule(rng, cost_ordered=rng.random() < 0.5)
    out = make_sequential(s, inst)
    assert validate(out, inst) == []
    assert is_sequential(out) and is_processor_descending(out, inst.m)
    assert payoff(out, inst) == payoff(s, inst) + relabel_gain(s, inst)
    assert relabel_gain(s, inst) >= 0


@given(st.integers(0, 10 ** 6))
def test_oracle_dominates_feasible_schedules(seed):
    inst, s = random_feasible_schedule(random.Random(seed), max_jobs=4)
    assert oracle_optimum(inst).objective >= payoff(s, inst)


@given(st.integers(0, 10 ** 6), st.integers(1, 99))
def test_modification_rate_identity(seed, pct):
    rng = random.Random(seed)
    inst, s = random_sequential_schedule(rng, splits=rng.randint(0, 2))
    t = rng.choice([iv.end for iv in layout(s, inst)])
    eps = modification_bound(s, inst, t) * Fraction(pct, 100) * rng.choice((1, -1))
    tr = apply_modification(s, inst, t, eps)
    assert tr.delta == eps * tr.rate
    assert check_xi_valid(tr, s, inst) == []


@given(st.integers(0, 10 ** 6))
def test_reordering_inside_a_segment_keeps_payoff(seed):
    rng = random.Random(seed)
    inst, s = random_sequential_schedule(rng)
    seg = rng.choice(find_segments(s))
    order = list(seg.amounts)
    rng.shuffle(order)
    pieces = [pc for pc in s.pieces if not (seg.start <= pc.start and pc.end <= seg.end)]
    cursor = seg.start
    for job in order:
        nxt = cursor + seg.amounts[job] / seg.width
        pieces.extend(Piece(job, z, cursor, nxt) for z in seg.machines)
        cursor = nxt
    moved = Schedule(s.private_completion, tuple(pieces))
    assume(validate(moved, inst) == [])
    assert payoff(moved, inst) == payoff(s, inst)


@given(st.integers(0, 10 ** 6))
def test_schedule_json_round_trip(seed):
    inst, s = random_feasible_schedule(random.Random(seed))
    text = json.dumps(schedule_to_dict(s))
    again = schedule_from_dict(json.loads(text), inst)
    assert again == s
    assert payoff(again, inst) == payoff(s, inst)
