import json
import re

import pytest

from sharedproc.cli import RunConfig, main, run
from sharedproc.render import layout_instance
from sharedproc.core import expand
from sharedproc.io import instance_to_dict, schedule_to_dict

D1 = {"machines": [{"cost": 1}], "jobs": [{"id": 1, "p": 4, "w": 3}, {"id": 2, "p": 8, "w": 2}]}
TWO_MACHINE = {"machines": [{"cost": 4}, {"cost": 5}],
        "jobs": [{"id": "j1", "p": 9, "w": 9}, {"id": "j2", "p": 9, "w": 7}, {"id": "j3", "p": 5, "w": 5}]}


@pytest.fixture
def files(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)
    return write


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_solve_oracle_on_d1(files, capsys):
    assert main(["solve", files("d1.json", D1), "--solver", "oracle"]) == 0
    out = _json(capsys)
    assert out["objective"] == 7
    assert out["detail"]["sequence"] == [[1, 1], [2, 1]]


@pytest.mark.parametrize("solver", ["exact", "alpha-lp", "alpha-flow", "antithetical"])
def test_solve_then_evaluate_round_trip(files, capsys, tmp_path, solver):
    inst = files("d1.json", D1)
    sched = str(tmp_path / "s.json")
    assert main(["solve", inst, "--solver", solver, "-o", sched]) == 0
    summary = _json(capsys)
    assert main(["evaluate", inst, sched]) == 0
    assert _json(capsys)["objective"] == summary["objective"]
    assert main(["validate", inst, sched]) == 0
    assert _json(capsys)["feasible"] is True


def test_alpha_summary_names_alpha_and_capacity(files, capsys):
    single = files("one.json", {"machines": [{"cost": 1}], "jobs": [{"id": "a", "p": 12, "w": 2}]})
    assert main(["solve", single, "--solver", "alpha-flow"]) == 0
    out = _json(capsys)
    assert (out["objective"], out["alpha"], out["capacity"]) == ("9/2", "5/8", "corrected")
    assert main(["solve", single, "--solver", "alpha-flow", "--paper-flow-capacity"]) == 0
    out = _json(capsys)
    assert (out["objective"], out["capacity"]) == (3, "paper")


def test_float_arithmetic(files, capsys):
    assert main(["solve", files("two.json", TWO_MACHINE), "--solver", "exact", "--arith", "float"]) == 0
    out = _json(capsys)
    assert abs(out["objective"] - 37) <= 1e-6 and out["arithmetic"] == "float"


def test_refusals_exit_3(files, caplog):
    assert main(["solve", files("two.json", TWO_MACHINE), "--solver", "antithetical"]) == 3
    assert "not antithetical" in caplog.text
    big = {"machines": [{"cost": 0}], "jobs": [{"p": k + 1, "w": 1} for k in range(7)]}
    assert main(["solve", files("big.json", big), "--solver", "oracle"]) == 3
    assert main(["solve", files("big.json", big), "--solver", "exact", "--max-jobs", "6"]) == 3


@pytest.mark.parametrize("text,fragment", [
    ('{"machines": [{"cost": 1}], "jobs": [{"id": 1, "p": -4, "w": 3}]}', "jobs[0].p"),
    ('{"machines": [{"cost": 1}],\n "jobs": [{"p": 4 "w": 3}]}', "line 2 column"),
    ('{"machines": [{"cost": 1}], "jobs": [{"p": 4}]}', "missing field 'w'"),
    ('{"machines": [{"cost": 1}], "jobs": []}', "non-empty"),
])
def test_input_errors_exit_2(files, caplog, text, fragment):
    assert main(["solve", files("bad.json", text), "--solver", "exact"]) == 2
    assert fragment in caplog.text


def test_validate_reports_violations(files, capsys):
    inst = files("d1.json", D1)
    bad = files("s.json", {"private_completion": {"1": 4, "2": 8}, "pieces": [{"job": 1, "machine": 1, "start": 0,
                                                                                "end": 1}]})
    assert main(["validate", inst, bad]) == 1
    out = _json(capsys)
    assert out["feasible"] is False and out["violations"][0]["rule"] == "eq1"
    assert main(["evaluate", inst, bad]) == 2


def test_transform_make_sequential_reports_equal_payoff(files, capsys):
    inst = files("d1.json", D1)
    sched = files("s.json", {"private_completion": {"1": 3, "2": 7},
                             "pieces": [{"job": 2, "machine": 1, "start": 0, "end": 1},
                                        {"job": 1, "machine": 1, "start": 2, "end": 3}]})
    assert main(["transform", inst, sched, "--op", "make-sequential"]) == 0
    out = _json(capsys)
    assert out["before"] == out["after"] == 3
    spans = sorted((pc["start"], pc["end"]) for pc in out["schedule"]["pieces"])
    assert spans == [(0, 1), (1, 2)]


def test_transform_canonicalize_with_trace(files, capsys, tmp_path):
    inst = files("d1.json", D1)
    sched = files("s.json", {"private_completion": {"1": 3, "2": 6},
                             "pieces": [{"job": 1, "machine": 1, "start": 0, "end": 1},
                                        {"job": 2, "machine": 1, "start": 1, "end": 3}]})
    trace = tmp_path / "trace.json"
    assert main(["transform", inst, sched, "--op", "canonicalize", "--trace", str(trace)]) == 0
    out = _json(capsys)
    assert out["converged"] is True and out["after"] == 7
    log = json.loads(trace.read_text())
    assert log[0]["op"] == "make-sequential" and log[-1]["payoff"] == 7


def test_transform_modify_dumps_trace(files, capsys):
    inst = files("d1.json", D1)
    sched = files("s.json", {"private_completion": {"1": 2, "2": 5},
                             "pieces": [{"job": 1, "machine": 1, "start": 0, "end": 2},
                                        {"job": 2, "machine": 1, "start": 2, "end": 5}]})
    assert main(["transform", inst, sched, "--op", "modify", "--at", "2", "--epsilon", "1/10"]) == 0
    out = _json(capsys)
    assert out["delta"] == "3/40"
    assert [s["case"] for s in out["steps"]] == ["main-II", "base"]
    assert main(["transform", inst, sched, "--op", "modify", "--at", "2", "--epsilon", "5"]) == 3


def test_render_five_slot_layout(files, capsys):
    inst, sync = layout_instance((4, 3, 3, 1, 1), ("1", "2", "7/2", "7", "10"))
    ipath = files("slots.json", instance_to_dict(inst))
    spath = files("slots_schedule.json", schedule_to_dict(expand(sync, inst)))
    assert main(["render", ipath, spath, "--format", "svg"]) == 0
    first = capsys.readouterr().out
    assert len(re.findall(r'class="breakpoint"', first)) == 5
    assert main(["render", ipath, spath, "--format", "svg"]) == 0
    assert capsys.readouterr().out == first
    assert main(["render", ipath, spath]) == 0
    assert "breakpoints: 1, 2, 3.5, 7, 10" in capsys.readouterr().out


def test_dumps(files, tmp_path, capsys):
    inst = files("d1.json", D1)
    lp, flow = tmp_path / "m.lp", tmp_path / "n.txt"
    assert main(["solve", inst, "--solver", "exact", "--dump-lp", str(lp)]) == 0
    assert "Maximize" in lp.read_text()
    assert main(["solve", inst, "--solver", "alpha-flow", "--dump-flow", str(flow)]) == 0
    assert flow.read_text().splitlines()[0] == "8 9"
    assert main(["solve", inst, "--solver", "oracle", "--dump-lp", str(lp)]) == 2


def test_fuzz_is_reproducible(capsys):
    assert main(["fuzz", "--seed", "3", "--jobs", "3", "--machines", "2", "--count", "3"]) == 0
    first = capsys.readouterr().out
    assert "solvers: 3 passed" in first
    assert main(["fuzz", "--seed", "3", "--jobs", "3", "--machines", "2", "--count", "3"]) == 0
    assert capsys.readouterr().out == first
    assert main(["fuzz", "--check", "nonsense"]) == 2


def test_run_config_invariants():
    with pytest.raises(ValueError):
        RunConfig(mode="solve")
    with pytest.raises(ValueError):
        RunConfig(mode="transform", op="rotate")
    with pytest.raises(ValueError):
        RunConfig(mode="dance")
    assert run(RunConfig(mode="fuzz", count=1, checks=["make-sequential"])) == 0


def test_module_entry_point(files):
    import subprocess
    import sys

    inst = files("d1.json", D1)
    done = subprocess.run([sys.executable, "-m", "sharedproc", "solve", inst, "--solver", "oracle"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0 and json.loads(done.stdout)["objective"] == 7
    bad = files("bad.json", '{"machines": [{"cost": 1}], "jobs": [{"p": -1, "w": 1}]}')
    done = subprocess.run([sys.executable, "-m", "sharedproc", "solve", bad, "--solver", "exact"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 2 and "jobs[0].p" in done.stderr
