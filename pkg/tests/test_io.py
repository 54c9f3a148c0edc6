import json
from fractions import Fraction

import pytest

from sharedproc.core import payoff
from sharedproc.io import (InputError, instance_from_dict, instance_to_dict, load_instance, load_schedule,
                           schedule_from_dict, schedule_to_dict)
from sharedproc.lp import solve_exact

TWO_MACHINE = {"machines": [{"cost": 4}, {"cost": 5}],
        "jobs": [{"id": "j1", "p": 9, "w": 9}, {"id": "j2", "p": 9, "w": 7}, {"id": "j3", "p": 5, "w": 5}]}


def test_two_machine_file(tmp_path):
    path = tmp_path / "two.json"
    path.write_text(json.dumps(TWO_MACHINE))
    inst, warnings = load_instance(path)
    assert inst.m == 2 and inst.costs == (4, 5)
    assert [(j.id, j.p, j.w) for j in inst.jobs] == [("j1", 9, 9), ("j2", 9, 7), ("j3", 5, 5)]
    assert warnings == []


def test_rational_and_decimal_numbers():
    inst, _ = instance_from_dict({"machines": [{"cost": "1/3"}], "jobs": [{"id": 1, "p": "5/8", "w": 0.1}]})
    assert inst.jobs[0].p == Fraction(5, 8)
    assert inst.jobs[0].w == Fraction(1, 10)
    assert inst.costs == (Fraction(1, 3),)


def test_costs_resorted_with_warning(caplog):
    inst, warnings = instance_from_dict({"machines": [{"cost": 5}, {"cost": 4}], "jobs": [{"p": 1, "w": 1}]})
    assert inst.costs == (4, 5)
    assert warnings and "re-sorted" in warnings[0]
    assert "re-sorted" in caplog.text


def test_missing_id_defaults_to_position():
    inst, _ = instance_from_dict({"machines": [{"cost": 1}], "jobs": [{"p": 1, "w": 1}, {"p": 2, "w": 1}]})
    assert inst.ids == (1, 2)


@pytest.mark.parametrize("data,fragment", [
    ({"machines": [{"cost": 1}], "jobs": []}, "jobs: need a non-empty list"),
    ({"machines": [{"cost": 1}]}, "missing field 'jobs'"),
    ({"machines": [{"cost": 1}], "jobs": [{"p": -4, "w": 1}]}, "jobs[0].p"),
    ({"machines": [{"cost": 1}], "jobs": [{"p": 4}]}, "missing field 'w'"),
    ({"machines": [{"cost": "x"}], "jobs": [{"p": 4, "w": 1}]}, "machines[0].cost"),
    ({"machines": [{"cost": -1}], "jobs": [{"p": 4, "w": 1}]}, "non-negative"),
    ({"machines": [{"cost": 1}], "jobs": [{"id": 1, "p": 4, "w": 1}, {"id": "1", "p": 4, "w": 1}]}, "unique"),
])
def test_instance_diagnostics(data, fragment):
    with pytest.raises(InputError) as err:
        instance_from_dict(data)
    assert fragment in str(err.value)


def test_json_syntax_error_has_line_and_column(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"machines": [{"cost": 1}],\n "jobs": [{"p": 4 "w": 1}]}')
    with pytest.raises(InputError, match="line 2 column"):
        load_instance(path)


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        load_instance(tmp_path / "nope.json")


def test_schedule_diagnostics():
    inst, _ = instance_from_dict(TWO_MACHINE)
    good = {"private_completion": {"j1": 9, "j2": 9, "j3": 5}, "pieces": []}
    assert schedule_from_dict(good, inst).pieces == ()
    with pytest.raises(InputError, match="unknown job id"):
        schedule_from_dict({**good, "pieces": [{"job": "j9", "machine": 1, "start": 0, "end": 1}]}, inst)
    with pytest.raises(InputError, match="machine"):
        schedule_from_dict({**good, "pieces": [{"job": "j1", "machine": 3, "start": 0, "end": 1}]}, inst)
    with pytest.raises(InputError, match="start <= end"):
        schedule_from_dict({**good, "pieces": [{"job": "j1", "machine": 1, "start": 2, "end": 1}]}, inst)
    with pytest.raises(InputError, match="missing jobs"):
        schedule_from_dict({"private_completion": {"j1": 9}, "pieces": []}, inst)


def test_integer_ids_match_string_keys():
    inst, _ = instance_from_dict({"machines": [{"cost": 1}], "jobs": [{"id": 1, "p": 4, "w": 3}]})
    s = schedule_from_dict({"private_completion": {"1": 2}, "pieces": [{"job": 1, "machine": 1, "start": 0,
                                                                        "end": 2}]}, inst)
    assert s.private_completion == {1: 2}


def test_round_trip_is_exact(tmp_path):
    inst, _ = instance_from_dict({"machines": [{"cost": "1/3"}, {"cost": 1}],
                                  "jobs": [{"id": "a", "p": "17/3", "w": 4}, {"id": "b", "p": 7, "w": "5/2"}]})
    res = solve_exact(inst)
    path = tmp_path / "s.json"
    path.write_text(json.dumps(schedule_to_dict(res.schedule)))
    again = load_schedule(path, inst)
    assert payoff(again, inst) == res.objective
    assert instance_from_dict(instance_to_dict(inst))[0] == inst
