from fractions import Fraction

import pytest

from sharedproc.core import (
    Instance, InfeasibleScheduleError, InvalidSynchronizedSchedule, Piece, Schedule, StructureError,
    SynchronizedSchedule, all_private, expand, payoff, synchronized_objective, total_weighted_overlap, validate,
)


def test_single_job_half_on_one_machine(single):
    s = Schedule.build({"a": 6}, [("a", 1, 0, 6)])
    assert validate(s, single) == []
    rep = total_weighted_overlap(s, single)
    assert rep.total_overlap == 6
    assert rep.total_weighted == 6


def test_same_job_may_overlap_itself_across_machines():
    inst = Instance.create([("a", 12, 1)], [0, 0, 0])
    s = Schedule.build({"a": 4}, [("a", 1, 0, 4), ("a", 2, 0, 3), ("a", 3, 1, 2)])
    assert validate(s, inst) == []
    assert total_weighted_overlap(s, inst).total_overlap == 8


def test_private_only_job_is_feasible():
    inst = Instance.create([("a", 5, 1)], [1])
    assert validate(all_private(inst), inst) == []
    assert payoff(all_private(inst), inst) == 0


def test_distinct_jobs_cannot_share_a_machine():
    inst = Instance.create([(1, 10, 1), (2, 10, 1)], [0])
    s = Schedule.build({1: 8, 2: 8}, [(1, 1, 0, 2), (2, 1, 1, 3)])
    rules = [v.rule for v in validate(s, inst)]
    assert rules == ["eq2"]


def test_eq1_and_eq3_violations_are_named():
    inst = Instance.create([(1, 10, 1)], [0])
    s = Schedule.build({1: 3}, [(1, 1, 0, 4)])
    rules = sorted(v.rule for v in validate(s, inst))
    assert rules == ["eq1", "eq3"]
    with pytest.raises(InfeasibleScheduleError):
        total_weighted_overlap(s, inst)


def test_unknown_job_or_machine_is_structural():
    inst = Instance.create([(1, 10, 1)], [0])
    with pytest.raises(StructureError):
        validate(Schedule.build({1: 5}, [(1, 2, 0, 5)]), inst)
    with pytest.raises(StructureError):
        validate(Schedule.build({1: 5, 9: 1}, []), inst)


def test_zero_length_pieces_dropped_and_touching_pieces_merged():
    s = Schedule.build({1: 4}, [(1, 1, 0, 2), (1, 1, 2, 3), (1, 1, 5, 5)])
    assert s.pieces == (Piece(1, 1, Fraction(0), Fraction(3)),)


def test_build_keeps_exact_numbers():
    s = Schedule.build({1: 4}, [(1, 1, 0, "1/3")])
    assert isinstance(s.pieces[0].end, Fraction)


def test_instance_rejects_bad_input():
    with pytest.raises(ValueError):
        Instance.create([], [1])
    with pytest.raises(ValueError):
        Instance.create([(1, -1, 1)], [1])
    with pytest.raises(ValueError):
        Instance.create([(1, 1, 1)], [2, 1])


def test_expand_single_job():
    inst = Instance.create([("a", 12, 2)], [1])
    sync = SynchronizedSchedule.from_sequence(inst, [("a", 1)])
    assert sync.boundaries == (0, 6)
    s = expand(sync, inst)
    assert s.pieces == (Piece("a", 1, 0, 6),)
    assert s.private_completion["a"] == 6


def test_expand_width_three():
    inst = Instance.create([("a", 12, 1)], [0, 0, 0])
    sync = SynchronizedSchedule.from_sequence(inst, [("a", 3)])
    assert sync.boundaries[-1] == 3


def test_empty_sequence_is_all_private(d1):
    sync = SynchronizedSchedule((), (0,))
    assert expand(sync, d1) == all_private(d1)
    assert synchronized_objective(sync, d1) == 0


def test_d1_synchronized_objective(d1):
    sync = SynchronizedSchedule.from_sequence(d1, [(1, 1), (2, 1)])
    assert sync.boundaries == (0, 2, 5)
    assert synchronized_objective(sync, d1) == 7
    assert payoff(expand(sync, d1), d1) == 7


def test_width_at_average_cost_contributes_nothing():
    inst = Instance.create([(1, 10, 3)], [2, 4])
    sync = SynchronizedSchedule.from_sequence(inst, [(1, 2)])
    assert synchronized_objective(sync, inst) == 0


def test_slot_layout_implies_processing_times():
    widths = (4, 3, 3, 1, 1)
    times = (Fraction(1), Fraction(2), Fraction(7, 2), Fraction(7), Fraction(10))
    prev, ps = Fraction(0), []
    for mi, t in zip(widths, times):
        ps.append(t + mi * (t - prev))
        prev = t
    assert ps == [5, 5, 8, Fraction(21, 2), 13]
    inst = Instance.create([(k, p, 1) for k, p in enumerate(ps, 1)], [0] * 4)
    sync = SynchronizedSchedule.from_sequence(inst, list(zip(range(1, 6), widths)))
    assert sync.boundaries[1:] == times


def test_synchronized_rejects_bad_widths_and_recurrence(d1):
    with pytest.raises(InvalidSynchronizedSchedule):
        SynchronizedSchedule.from_sequence(d1, [(1, 2)])  # wider than m
    with pytest.raises(InvalidSynchronizedSchedule):
        expand(SynchronizedSchedule(((1, 1),), (0, 3)), d1)


def test_zero_length_slot_is_legal(d1):
    sync = SynchronizedSchedule.from_sequence(d1, [(2, 1), (1, 1)])
    assert sync.boundaries == (0, 4, 4)
    s = expand(sync, d1)
    assert validate(s, d1) == []
    assert synchronized_objective(sync, d1) == payoff(s, d1) == 4


def test_float_mode_matches_exact(d1):
    fl = d1.to_float()
    sync = SynchronizedSchedule.from_sequence(fl, [(1, 1), (2, 1)])
    assert abs(synchronized_objective(sync, fl) - 7) <= 1e-9
    assert abs(payoff(expand(sync, fl), fl) - 7) <= 1e-9
