"""Instances, schedules, feasibility checks and the total weighted overlap.

A job runs on its private processor in ``(0, C)`` and, simultaneously, in
any number of pieces on the ``m`` shared processors.  A piece of job ``j`` on
shared processor ``i`` earns ``w_j - c_i`` per unit of time it overlaps the
private execution.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, List, Mapping, Optional, Tuple

from ._numbers import Number, is_exact, parse_number, tolerance

JobId = Hashable


class StructureError(ValueError):
    """A schedule references jobs or machines the instance does not have."""


class InfeasibleScheduleError(ValueError):
    """Raised when an operation requires a feasible schedule."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(v.message for v in self.violations[:5])
        super().__init__(f"schedule is infeasible ({len(self.violations)} violations): {lines}")


class InvalidSynchronizedSchedule(ValueError):
    pass


@dataclass(frozen=True)
class Job:
    id: JobId
    p: Number
    w: Number

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError(f"job {self.id!r}: processing time must be positive, got {self.p}")
        if self.w < 0:
            raise ValueError(f"job {self.id!r}: weight must be non-negative, got {self.w}")


@dataclass(frozen=True)
class Instance:
    """Jobs plus shared-processor costs ``c_1 <= ... <= c_m``.

    Use :meth:`create` to build one from plain numbers; it picks the
    arithmetic mode and coerces every value to it.
    """

    jobs: Tuple[Job, ...]
    costs: Tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "costs", tuple(self.costs))
        if not self.jobs:
            raise ValueError("an instance needs at least one job")
        if not self.costs:
            raise ValueError("an instance needs at least one shared processor")
        if any(c < 0 for c in self.costs):
            raise ValueError("shared processor costs must be non-negative")
        if any(a > b for a, b in zip(self.costs, self.costs[1:])):
            raise ValueError("shared processor costs must be sorted non-decreasing")
        ids = [j.id for j in self.jobs]
        if len(set(ids)) != len(ids):
            raise ValueError("job ids must be unique")
        object.__setattr__(self, "_index", {j.id: k for k, j in enumerate(self.jobs)})

    @classmethod
    def create(cls, jobs, costs, exact: Optional[bool] = None) -> "Instance":
        """``jobs`` is an iterable of ``(id, p, w)`` triples or :class:`Job` objects."""
        triples = [(j.id, j.p, j.w) if isinstance(j, Job) else tuple(j) for j in jobs]
        if exact is None:
            raw = [v for _, p, w in triples for v in (p, w)] + list(costs)
            exact = not any(isinstance(v, float) for v in raw)
        return cls(
            tuple(Job(i, parse_number(p, exact), parse_number(w, exact)) for i, p, w in triples),
            tuple(parse_number(c, exact) for c in costs),
        )

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def m(self) -> int:
        return len(self.costs)

    @property
    def exact(self) -> bool:
        return is_exact([c for c in self.costs] + [j.p for j in self.jobs] + [j.w for j in self.jobs])

    @property
    def tol(self):
        return tolerance(self.exact)

    @property
    def ids(self) -> Tuple[JobId, ...]:
        return tuple(j.id for j in self.jobs)

    def job(self, job_id) -> Job:
        try:
            return self.jobs[self._index[job_id]]
        except KeyError:
            raise StructureError(f"unknown job id {job_id!r}") from None

    def position(self, job_id) -> int:
        try:
            return self._index[job_id]
        except KeyError:
            raise StructureError(f"unknown job id {job_id!r}") from None

    def cost(self, machine: int) -> Number:
        """Cost of shared processor ``machine`` (1-based)."""
        if not 1 <= machine <= self.m:
            raise StructureError(f"machine index {machine} outside 1..{self.m}")
        return self.costs[machine - 1]

    def prefix_cost(self, width: int) -> Number:
        """Sum of the ``width`` cheapest costs."""
        return sum(self.costs[:width], self._zero())

    def _zero(self):
        return Fraction(0) if self.exact else 0.0

    def to_float(self) -> "Instance":
        return Instance(
            tuple(Job(j.id, float(j.p), float(j.w)) for j in self.jobs),
            tuple(float(c) for c in self.costs),
        )

    def to_exact(self) -> "Instance":
        return Instance(
            tuple(Job(j.id, parse_number(j.p), parse_number(j.w)) for j in self.jobs),
            tuple(parse_number(c) for c in self.costs),
        )


@dataclass(frozen=True)
class Piece:
    job: JobId
    machine: int
    start: Number
    end: Number

    def __post_init__(self):
        if self.start < 0:
            raise ValueError(f"piece of {self.job!r} starts before time 0")
        if not self.start < self.end:
            raise ValueError(f"piece of {self.job!r} on machine {self.machine} has non-positive length")

    @property
    def length(self):
        return self.end - self.start


@dataclass(frozen=True, eq=True)
class Schedule:
    """Private completion times plus shared-processor pieces.

    Zero-length pieces are dropped and touching pieces of one job on one
    machine are merged, so every stored piece is a maximal interval.
    """

    private_completion: Mapping[JobId, Number]
    pieces: Tuple[Piece, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "private_completion", dict(self.private_completion))
        object.__setattr__(self, "pieces", _normalize_pieces(self.pieces))

    @classmethod
    def build(cls, private_completion, pieces, exact: Optional[bool] = None) -> "Schedule":
        """Accepts ``(job, machine, start, end)`` tuples; drops empty ones.

        Numbers are coerced like :meth:`Instance.create` does: exact unless
        some value is a float.
        """
        raw = [tuple(pc) if not isinstance(pc, Piece) else (pc.job, pc.machine, pc.start, pc.end) for pc in pieces]
        if exact is None:
            values = list(private_completion.values()) + [v for r in raw for v in r[2:]]
            exact = not any(isinstance(v, float) for v in values)
        completion = {j: parse_number(c, exact) for j, c in private_completion.items()}
        out = []
        for job, machine, start, end in raw:
            start, end = parse_number(start, exact), parse_number(end, exact)
            if end == start:
                continue
            out.append(Piece(job, int(machine), start, end))
        return cls(completion, tuple(out))

    def pieces_of(self, job) -> List[Piece]:
        return [pc for pc in self.pieces if pc.job == job]

    def on_machine(self, machine: int) -> List[Piece]:
        return sorted((pc for pc in self.pieces if pc.machine == machine), key=lambda pc: pc.start)

    def shared_amount(self, job):
        return sum((pc.length for pc in self.pieces if pc.job == job), 0 * self.private_completion[job])

    @property
    def shared_makespan(self):
        """Last time any shared processor is busy (0 when none is used)."""
        ends = [pc.end for pc in self.pieces]
        if ends:
            return max(ends)
        zero = next(iter(self.private_completion.values()), 0) * 0
        return zero

    def with_private(self, job, completion) -> "Schedule":
        pc = dict(self.private_completion)
        pc[job] = completion
        return Schedule(pc, self.pieces)


def _normalize_pieces(pieces) -> Tuple[Piece, ...]:
    # stable order: machine, then start; ties keep insertion order
    items = sorted((pc for pc in pieces if pc.end != pc.start), key=lambda pc: (pc.machine, pc.start, pc.end))
    merged: List[Piece] = []
    last_by_key: Dict[Tuple, int] = {}
    for pc in items:
        key = (pc.job, pc.machine)
        k = last_by_key.get(key)
        if k is not None and merged[k].end == pc.start:
            prev = merged[k]
            merged[k] = Piece(prev.job, prev.machine, prev.start, pc.end)
            continue
        last_by_key[key] = len(merged)
        merged.append(pc)
    merged.sort(key=lambda pc: (pc.machine, pc.start, pc.end))
    return tuple(merged)


@dataclass(frozen=True)
class Violation:
    rule: str  # "eq1" total length, "eq2" machine exclusion, "eq3" within private interval, "disjoint"
    job: Optional[JobId]
    machine: Optional[int]
    magnitude: Number
    message: str


def check_structure(schedule: Schedule, instance: Instance) -> None:
    """Raise :class:`StructureError` for unknown/missing jobs or bad machine indices."""
    for pc in schedule.pieces:
        if pc.job not in instance._index:
            raise StructureError(f"piece references unknown job {pc.job!r}")
        if not 1 <= pc.machine <= instance.m:
            raise StructureError(f"piece of {pc.job!r} on machine {pc.machine} outside 1..{instance.m}")
    for job_id in schedule.private_completion:
        if job_id not in instance._index:
            raise StructureError(f"private completion given for unknown job {job_id!r}")
    missing = [j.id for j in instance.jobs if j.id not in schedule.private_completion]
    if missing:
        raise StructureError(f"no private completion for jobs {missing!r}")


def validate(schedule: Schedule, instance: Instance, tol=None) -> List[Violation]:
    """Feasibility violations of ``schedule``; empty means feasible."""
    check_structure(schedule, instance)
    if tol is None:
        tol = instance.tol if is_exact(schedule.private_completion.values()) else max(instance.tol, 1e-9)
    out: List[Violation] = []
    totals = defaultdict(lambda: 0)
    for pc in schedule.pieces:
        totals[pc.job] += pc.length
    for job in instance.jobs:
        c = schedule.private_completion[job.id]
        if c < -tol:
            out.append(Violation("eq1", job.id, None, -c, f"job {job.id!r}: negative private completion {c}"))
        gap = c + totals[job.id] - job.p
        if abs(gap) > tol:
            out.append(Violation("eq1", job.id, None, abs(gap),
                                 f"job {job.id!r}: executes {c + totals[job.id]} in total, needs {job.p}"))
    for pc in schedule.pieces:
        c = schedule.private_completion[pc.job]
        if pc.end - c > tol:
            out.append(Violation("eq3", pc.job, pc.machine, pc.end - c,
                                 f"job {pc.job!r}: piece ({pc.start}, {pc.end}) on M{pc.machine} "
                                 f"ends after private completion {c}"))
    for machine in range(1, instance.m + 1):
        row = schedule.on_machine(machine)
        for a in range(len(row)):
            for b in range(a + 1, len(row)):
                x, y = row[a], row[b]
                if y.start >= x.end:
                    break
                common = min(x.end, y.end) - max(x.start, y.start)
                if common > tol:
                    rule = "eq2" if x.job != y.job else "disjoint"
                    out.append(Violation(rule, x.job if rule == "disjoint" else None, machine, common,
                                         f"M{machine}: pieces of {x.job!r} and {y.job!r} overlap by {common}"))
    return out


def is_feasible(schedule: Schedule, instance: Instance) -> bool:
    return not validate(schedule, instance)


@dataclass(frozen=True)
class OverlapReport:
    per_job_per_machine: Dict[Tuple[JobId, int], Number]
    per_job: Dict[JobId, Number]
    total_weighted: Number

    @property
    def total_overlap(self):
        return sum(self.per_job_per_machine.values(), 0 * self.total_weighted)


def overlap_report(schedule: Schedule, instance: Instance) -> OverlapReport:
    """Overlap accounting without a feasibility check.

    Used on intentionally infeasible intermediate schedules; each piece
    counts only where it meets ``(0, C_j)``.
    """
    zero = instance._zero()
    amounts: Dict[Tuple[JobId, int], Number] = {}
    for pc in schedule.pieces:
        c = schedule.private_completion[pc.job]
        inside = min(pc.end, c) - pc.start
        if inside > 0:
            key = (pc.job, pc.machine)
            amounts[key] = amounts.get(key, zero) + inside
    per_job: Dict[JobId, Number] = {j.id: zero for j in instance.jobs}
    for (job, machine), amount in amounts.items():
        per_job[job] += amount * (instance.job(job).w - instance.cost(machine))
    return OverlapReport(amounts, per_job, sum(per_job.values(), zero))


def total_weighted_overlap(schedule: Schedule, instance: Instance) -> OverlapReport:
    violations = validate(schedule, instance)
    if violations:
        raise InfeasibleScheduleError(violations)
    return overlap_report(schedule, instance)


def payoff(schedule: Schedule, instance: Instance) -> Number:
    return total_weighted_overlap(schedule, instance).total_weighted


@dataclass(frozen=True)
class SynchronizedSchedule:
    """Ordered jobs with non-increasing widths and boundaries ``t_0 = 0 <= t_1 <= ...``.

    Job ``sequence[i]`` runs on the ``width`` cheapest machines in
    ``(boundaries[i], boundaries[i+1])`` and finishes privately at
    ``boundaries[i+1]``.
    """

    sequence: Tuple[Tuple[JobId, int], ...]
    boundaries: Tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple((j, int(w)) for j, w in self.sequence))
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        if len(self.boundaries) != len(self.sequence) + 1:
            raise InvalidSynchronizedSchedule("need exactly one boundary per job plus t_0")

    @classmethod
    def from_sequence(cls, instance: Instance, sequence) -> "SynchronizedSchedule":
        """Compute boundaries from ``t_i = (p + m_i t_{i-1}) / (1 + m_i)``."""
        t = [instance._zero()]
        for job_id, width in sequence:
            p = instance.job(job_id).p
            t.append((p + width * t[-1]) / (1 + width))
        sync = cls(tuple(sequence), tuple(t))
        check_synchronized(sync, instance)
        return sync

    @property
    def jobs(self):
        return tuple(j for j, _ in self.sequence)

    @property
    def widths(self):
        return tuple(w for _, w in self.sequence)


def check_synchronized(sync: SynchronizedSchedule, instance: Instance) -> None:
    tol = instance.tol
    if sync.boundaries[0] != 0:
        raise InvalidSynchronizedSchedule("t_0 must be 0")
    jobs = sync.jobs
    if len(set(jobs)) != len(jobs):
        raise InvalidSynchronizedSchedule("a job is listed twice")
    prev_width = instance.m
    for i, (job_id, width) in enumerate(sync.sequence, start=1):
        if not 1 <= width <= prev_width:
            raise InvalidSynchronizedSchedule(
                f"width {width} of {job_id!r} breaks m >= m_1 >= ... >= m_k >= 1")
        prev_width = width
        lo, hi = sync.boundaries[i - 1], sync.boundaries[i]
        if hi < lo - tol:
            raise InvalidSynchronizedSchedule(f"boundary t_{i} = {hi} precedes t_{i-1} = {lo}")
        p = instance.job(job_id).p
        if abs(hi + width * (hi - lo) - p) > tol:
            raise InvalidSynchronizedSchedule(
                f"t_{i} + m_{i}(t_{i} - t_{i-1}) = {hi + width * (hi - lo)} != p = {p} for {job_id!r}")


def expand(sync: SynchronizedSchedule, instance: Instance) -> Schedule:
    check_synchronized(sync, instance)
    completion = {j.id: j.p for j in instance.jobs}
    pieces = []
    for i, (job_id, width) in enumerate(sync.sequence, start=1):
        lo, hi = sync.boundaries[i - 1], sync.boundaries[i]
        completion[job_id] = hi
        if hi > lo:
            pieces.extend(Piece(job_id, machine, lo, hi) for machine in range(1, width + 1))
    return Schedule(completion, tuple(pieces))


def synchronized_objective(sync: SynchronizedSchedule, instance: Instance) -> Number:
    check_synchronized(sync, instance)
    total = instance._zero()
    for i, (job_id, width) in enumerate(sync.sequence, start=1):
        slot = sync.boundaries[i] - sync.boundaries[i - 1]
        total += slot * (width * instance.job(job_id).w - instance.prefix_cost(width))
    return total


def all_private(instance: Instance) -> Schedule:
    return Schedule({j.id: j.p for j in instance.jobs}, ())
