"""JSON instance and schedule files.

Instance::

    {"machines": [{"cost": 4}, {"cost": 5}],
     "jobs": [{"id": "j1", "p": 9, "w": 9}, ...]}

Schedule::

    {"private_completion": {"j1": 6},
     "pieces": [{"job": "j1", "machine": 1, "start": 0, "end": 6}]}

Numbers may be JSON numbers (read as decimal literals) or ``"a/b"`` strings.
Output writes integers as numbers and other rationals as ``"a/b"`` strings so
that files round-trip exactly.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

from ._numbers import format_number, parse_number
from .core import Instance, Job, Piece, Schedule

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class InputError(ValueError):
    """Malformed input file; the message names the offending field."""


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _number(value, where: str, exact: bool = True):
    try:
        return parse_number(value, exact)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"{where}: expected a number or 'a/b' string, got {value!r}") from None


def _field(obj, key, where):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    return obj[key]


def instance_from_dict(data, source: str = "instance") -> Tuple[Instance, List[str]]:
    """Build an exact instance; returns it with any warnings raised while reading."""
    warnings: List[str] = []
    machines = _field(data, "machines", source)
    jobs = _field(data, "jobs", source)
    if not isinstance(machines, list) or not machines:
        raise InputError(f"{source}.machines: need a non-empty list")
    if not isinstance(jobs, list) or not jobs:
        raise InputError(f"{source}.jobs: need a non-empty list")
    costs = []
    for k, mach in enumerate(machines):
        where = f"{source}.machines[{k}]"
        c = _number(_field(mach, "cost", where), f"{where}.cost")
        if c < 0:
            raise InputError(f"{where}.cost: must be non-negative, got {mach['cost']!r}")
        costs.append(c)
    if costs != sorted(costs):
        warnings.append("machine costs were not in ascending order; re-sorted (machine indices follow the sorted order)")
        costs.sort()
    parsed = []
    for k, job in enumerate(jobs):
        where = f"{source}.jobs[{k}]"
        job_id = job.get("id", k + 1) if isinstance(job, dict) else None
        p = _number(_field(job, "p", where), f"{where}.p")
        w = _number(_field(job, "w", where), f"{where}.w")
        if not p > 0:
            raise InputError(f"{where}.p: processing time must be positive, got {job['p']!r}")
        if w < 0:
            raise InputError(f"{where}.w: weight must be non-negative, got {job['w']!r}")
        if isinstance(job_id, (list, dict)):
            raise InputError(f"{where}.id: must be a string or integer")
        parsed.append(Job(job_id, p, w))
    ids = [j.id for j in parsed]
    if len({str(i) for i in ids}) != len(ids):
        raise InputError(f"{source}.jobs: job ids must be unique")
    for msg in warnings:
        logger.warning(msg)
    return Instance(tuple(parsed), tuple(costs)), warnings


def load_instance(path: PathLike) -> Tuple[Instance, List[str]]:
    return instance_from_dict(_load_json(_read(path), str(path)), str(path))


def instance_to_dict(instance: Instance) -> dict:
    return {
        "machines": [{"cost": format_number(c)} for c in instance.costs],
        "jobs": [{"id": j.id, "p": format_number(j.p), "w": format_number(j.w)} for j in instance.jobs],
    }


def _id_lookup(instance: Instance) -> Dict[str, object]:
    return {str(j.id): j.id for j in instance.jobs}


def schedule_from_dict(data, instance: Instance, source: str = "schedule") -> Schedule:
    exact = instance.exact
    lookup = _id_lookup(instance)

    def job_ref(raw, where):
        key = str(raw)
        if key not in lookup:
            raise InputError(f"{where}: unknown job id {raw!r}")
        return lookup[key]

    completion_raw = _field(data, "private_completion", source)
    if not isinstance(completion_raw, dict):
        raise InputError(f"{source}.private_completion: expected an object")
    completion = {}
    for key, value in completion_raw.items():
        where = f"{source}.private_completion[{key!r}]"
        completion[job_ref(key, where)] = _number(value, where, exact)
    missing = [j.id for j in instance.jobs if j.id not in completion]
    if missing:
        raise InputError(f"{source}.private_completion: missing jobs {missing!r}")
    pieces = []
    for k, raw in enumerate(_field(data, "pieces", source)):
        where = f"{source}.pieces[{k}]"
        job = job_ref(_field(raw, "job", where), f"{where}.job")
        machine = _field(raw, "machine", where)
        if not isinstance(machine, int) or isinstance(machine, bool) or not 1 <= machine <= instance.m:
            raise InputError(f"{where}.machine: expected an integer in 1..{instance.m}, got {machine!r}")
        start = _number(_field(raw, "start", where), f"{where}.start", exact)
        end = _number(_field(raw, "end", where), f"{where}.end", exact)
        if start < 0 or end < start:
            raise InputError(f"{where}: need 0 <= start <= end, got ({raw['start']!r}, {raw['end']!r})")
        if end > start:
            pieces.append(Piece(job, machine, start, end))
    return Schedule(completion, tuple(pieces))


def load_schedule(path: PathLike, instance: Instance) -> Schedule:
    return schedule_from_dict(_load_json(_read(path), str(path)), instance, str(path))


def schedule_to_dict(schedule: Schedule) -> dict:
    return {
        "private_completion": {str(j): format_number(c) for j, c in schedule.private_completion.items()},
        "pieces": [
            {"job": pc.job, "machine": pc.machine, "start": format_number(pc.start), "end": format_number(pc.end)}
            for pc in schedule.pieces
        ],
    }


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"
