"""Schedule transformations: segments, MakeSequential, modifications, transfers.

Processor-descending schedules here use the prefix form: shared processor
``i`` is busy exactly in ``(0, B_i)`` with ``B_1 >= B_2 >= ... >= B_m``, so a
segment of width ``m'`` always occupies processors ``1..m'``.  A
processor-descending sequential schedule is then fully described by its list
of intervals ``(s, e, job, width)``, which tile ``(0, B_1)``.

Everything here is meant for exact arithmetic; float schedules work but
equalities such as ``e == C`` are then tested with the instance tolerance.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from ._numbers import Number, format_number
from .core import (
    InfeasibleScheduleError,
    Instance,
    JobId,
    Piece,
    Schedule,
    overlap_report,
    validate,
)
from .errors import InvariantBreach, TransformError

logger = logging.getLogger(__name__)

BASE = "base"
MAIN_I = "main-I"
MAIN_II = "main-II"


def _same(a, b, tol) -> bool:
    return a == b if tol == 0 else abs(a - b) <= tol


def _omega(schedule: Schedule, instance: Instance):
    return overlap_report(schedule, instance).total_weighted


def _require_feasible(schedule: Schedule, instance: Instance) -> None:
    bad = validate(schedule, instance)
    if bad:
        raise InfeasibleScheduleError(bad)


def _check_identity(label: str, actual, expected, instance: Instance) -> None:
    scale = max(1, abs(expected)) if not instance.exact else 1
    if not _same(actual, expected, instance.tol * scale):
        raise InvariantBreach(f"{label}: got {actual}, expected {expected}")


# ------------------------------------------------------------------ segments


@dataclass(frozen=True)
class _Cell:
    start: Number
    end: Number
    occupant: Dict[int, JobId]  # machine -> job


def _cells(pieces: Sequence[Piece]) -> List[_Cell]:
    """Elementary intervals between consecutive piece endpoints."""
    points = sorted({pc.start for pc in pieces} | {pc.end for pc in pieces})
    by_start = sorted(pieces, key=lambda pc: pc.start)
    cells = []
    for a, b in zip(points, points[1:]):
        occ = {pc.machine: pc.job for pc in by_start if pc.start <= a and pc.end >= b}
        cells.append(_Cell(a, b, occ))
    return cells


@dataclass(frozen=True)
class Segment:
    """Maximal interval in which each shared processor is busy throughout or idle throughout."""

    start: Number
    end: Number
    machines: Tuple[int, ...]
    amounts: Dict[JobId, Number]  # job -> total time in the segment, by first appearance
    cells: Tuple[_Cell, ...] = field(repr=False, compare=False, default=())

    @property
    def width(self) -> int:
        return len(self.machines)

    def is_sequential(self) -> bool:
        """Each present job runs in one common sub-interval on every busy processor."""
        spans: Dict[JobId, Tuple] = {}
        for machine in self.machines:
            runs: Dict[JobId, List[List[Number]]] = {}
            for cell in self.cells:
                job = cell.occupant[machine]
                r = runs.setdefault(job, [])
                if r and r[-1][1] == cell.start:
                    r[-1][1] = cell.end
                else:
                    r.append([cell.start, cell.end])
            for job in self.amounts:
                r = runs.get(job)
                if not r or len(r) != 1:
                    return False
                span = (r[0][0], r[0][1])
                if spans.setdefault(job, span) != span:
                    return False
        return True


def find_segments(schedule: Schedule) -> List[Segment]:
    """Segments in time order; stretches with every processor idle are skipped."""
    cells = _cells(schedule.pieces)
    out: List[Segment] = []
    group: List[_Cell] = []

    def close():
        if not group:
            return
        amounts: Dict[JobId, Number] = {}
        for cell in group:
            for machine in sorted(cell.occupant):
                job = cell.occupant[machine]
                amounts[job] = amounts.get(job, 0) + (cell.end - cell.start)
        machines = tuple(sorted(group[0].occupant))
        out.append(Segment(group[0].start, group[-1].end, machines, amounts, tuple(group)))
        group.clear()

    for cell in cells:
        if not cell.occupant:
            close()
            continue
        if group and (group[-1].end != cell.start or set(group[-1].occupant) != set(cell.occupant)):
            close()
        group.append(cell)
    close()
    return out


def machine_loads(schedule: Schedule, m: int) -> List[Number]:
    """Last busy time per processor, index 0 for processor 1."""
    zero = schedule.shared_makespan * 0
    loads = [zero] * m
    for pc in schedule.pieces:
        if pc.end > loads[pc.machine - 1]:
            loads[pc.machine - 1] = pc.end
    return loads


def is_processor_descending(schedule: Schedule, m: int) -> bool:
    """Each processor busy in one block ``(0, B_i)`` and ``B_1 >= ... >= B_m``."""
    loads = []
    for machine in range(1, m + 1):
        row = schedule.on_machine(machine)
        cursor = 0
        for pc in row:
            if pc.start != cursor:
                return False
            cursor = pc.end
        loads.append(cursor)
    return all(a >= b for a, b in zip(loads, loads[1:]))


def is_sequential(schedule: Schedule) -> bool:
    return all(seg.is_sequential() for seg in find_segments(schedule))


# ------------------------------------------------------------ MakeSequential


def _compact(schedule: Schedule) -> Schedule:
    """Close every idle gap by sliding pieces left, per processor."""
    pieces = []
    machines = sorted({pc.machine for pc in schedule.pieces})
    for machine in machines:
        cursor = 0 * schedule.shared_makespan
        for pc in schedule.on_machine(machine):
            pieces.append(Piece(pc.job, machine, cursor, cursor + pc.length))
            cursor = cursor + pc.length
    return Schedule(schedule.private_completion, tuple(pieces))


def _relabel_map(schedule: Schedule, m: int) -> Dict[int, int]:
    loads = machine_loads(schedule, m)
    order = sorted(range(1, m + 1), key=lambda z: (-loads[z - 1], z))
    return {old: new for new, old in enumerate(order, start=1)}


def relabel_gain(schedule: Schedule, instance: Instance) -> Number:
    """Payoff gained when the busiest processors move onto the cheapest ones.

    Zero when loads already follow the cost order (or costs tie).
    """
    compact = _compact(schedule)
    mapping = _relabel_map(compact, instance.m)
    gain = instance._zero()
    for pc in compact.pieces:
        gain += pc.length * (instance.cost(pc.machine) - instance.cost(mapping[pc.machine]))
    return gain


def make_sequential(schedule: Schedule, instance: Instance) -> Schedule:
    """Processor-descending, sequential schedule with no less payoff.

    Pieces are slid left to close idle gaps, processors are relabelled so
    the cheapest carry the most work, and each segment that is not already
    sequential is re-laid with its jobs in order of private completion.
    """
    _require_feasible(schedule, instance)
    compact = _compact(schedule)
    mapping = _relabel_map(compact, instance.m)
    relabelled = Schedule(
        compact.private_completion,
        tuple(replace(pc, machine=mapping[pc.machine]) for pc in compact.pieces),
    )
    completion = relabelled.private_completion
    pieces: List[Piece] = []
    for seg in find_segments(relabelled):
        if seg.is_sequential():
            for pc in relabelled.pieces:
                lo, hi = max(pc.start, seg.start), min(pc.end, seg.end)
                if pc.machine in seg.machines and lo < hi:
                    pieces.append(Piece(pc.job, pc.machine, lo, hi))
            continue
        first_seen = {}
        for cell in seg.cells:
            for job in cell.occupant.values():
                first_seen.setdefault(job, cell.start)
        jobs = sorted(seg.amounts, key=lambda j: (completion[j], first_seen[j], instance.position(j)))
        cursor = seg.start
        for job in jobs:
            nxt = cursor + seg.amounts[job] / seg.width
            pieces.extend(Piece(job, z, cursor, nxt) for z in seg.machines)
            cursor = nxt
    return Schedule(completion, tuple(pieces))


# ------------------------------------------------------------------- layout


@dataclass(frozen=True)
class Interval:
    start: Number
    end: Number
    job: JobId
    width: int
    segment: int = 0

    @property
    def length(self):
        return self.end - self.start


def layout(schedule: Schedule, instance: Instance) -> List[Interval]:
    """Intervals of a processor-descending sequential schedule, in time order."""
    if not is_processor_descending(schedule, instance.m):
        raise TransformError("schedule is not processor-descending")
    out: List[Interval] = []
    for index, seg in enumerate(find_segments(schedule)):
        if not seg.is_sequential():
            raise TransformError(f"segment ({seg.start}, {seg.end}) is not sequential")
        for cell in seg.cells:
            job = cell.occupant[1]
            if out and out[-1].job == job and out[-1].segment == index and out[-1].end == cell.start:
                out[-1] = replace(out[-1], end=cell.end)
            else:
                out.append(Interval(cell.start, cell.end, job, seg.width, index))
    return out


def materialize(intervals: Sequence[Interval], completion) -> Schedule:
    pieces = []
    for iv in intervals:
        if iv.end == iv.start:
            continue
        if iv.end < iv.start:
            raise InvariantBreach(f"interval of {iv.job!r} would end at {iv.end} before it starts at {iv.start}")
        pieces.extend(Piece(iv.job, z, iv.start, iv.end) for z in range(1, iv.width + 1))
    return Schedule(completion, tuple(pieces))


@dataclass(frozen=True)
class IntervalDescriptor:
    start: Number
    end: Number
    job: JobId
    width: int
    factor: int
    radius: Number
    synchronized: bool
    segment: int = 0


def _describe(iv: Interval, schedule: Schedule, instance: Instance) -> IntervalDescriptor:
    c = schedule.private_completion[iv.job]
    if _same(iv.end, c, instance.tol):
        radius = min(iv.end - iv.start, instance.job(iv.job).p - iv.end)
        return IntervalDescriptor(iv.start, iv.end, iv.job, iv.width, iv.width + 1, radius, True, iv.segment)
    radius = min(iv.end - iv.start, c - iv.end)
    return IntervalDescriptor(iv.start, iv.end, iv.job, iv.width, iv.width, radius, False, iv.segment)


def describe_intervals(schedule: Schedule, instance: Instance) -> List[IntervalDescriptor]:
    """Width, factor and radius of every interval, ordered by end time."""
    return [_describe(iv, schedule, instance) for iv in layout(schedule, instance)]


def end_points(schedule: Schedule, instance: Instance) -> List[Number]:
    """All interval start and end points."""
    pts = set()
    for iv in layout(schedule, instance):
        pts.update((iv.start, iv.end))
    return sorted(pts)


def _gain(instance: Instance, job: JobId, width: int):
    """``sum_{z <= width} (w_job - c_z)``."""
    return width * instance.job(job).w - instance.prefix_cost(width)


def _suffix_at(descs: List[IntervalDescriptor], t) -> int:
    for k, d in enumerate(descs):
        if d.end == t:
            return k
    raise TransformError(f"{t} is not the end point of any interval")


def rate(schedule: Schedule, instance: Instance, t) -> Number:
    """Payoff per unit of shift for the modification that starts at end point ``t``."""
    descs = describe_intervals(schedule, instance)
    suffix = descs[_suffix_at(descs, t):]
    d0 = suffix[0]
    total = _gain(instance, d0.job, d0.width) / d0.factor
    prod_prev = instance._zero() + 1  # prod_{z=1}^{i-1} m_z / m^+_{z-1}
    for i in range(1, len(suffix)):
        prod = prod_prev * suffix[i].width / suffix[i - 1].factor
        coef = prod / suffix[i].factor - prod_prev / suffix[i - 1].factor
        total += coef * _gain(instance, suffix[i].job, suffix[i].width)
        prod_prev = prod
    return total


# ------------------------------------------------------------- modification


@dataclass(frozen=True)
class StepRecord:
    index: int
    job: JobId
    case: str
    epsilon: Number
    shift: Number
    old_end: Number
    new_end: Number
    payoff: Number
    doable_bound: Number  # |epsilon_i| may not exceed factor * radius


@dataclass(frozen=True)
class ModificationTrace:
    start: Number
    epsilon: Number
    job: JobId
    bound: Number  # half the smallest width * radius over the suffix
    rate: Number
    steps: Tuple[StepRecord, ...]
    schedule: Schedule = field(repr=False)

    @property
    def epsilons(self) -> Tuple[Number, ...]:
        return tuple(s.epsilon for s in self.steps)

    @property
    def delta(self) -> Number:
        return sum((s.payoff for s in self.steps), 0 * self.epsilon)

    def to_dict(self) -> dict:
        f = format_number
        return {
            "start": f(self.start),
            "epsilon": f(self.epsilon),
            "job": self.job,
            "bound": f(self.bound),
            "rate": f(self.rate),
            "delta": f(self.delta),
            "steps": [
                {
                    "index": s.index,
                    "job": s.job,
                    "case": s.case,
                    "epsilon": f(s.epsilon),
                    "shift": f(s.shift),
                    "old_end": f(s.old_end),
                    "new_end": f(s.new_end),
                    "payoff": f(s.payoff),
                    "doable_bound": f(s.doable_bound),
                }
                for s in self.steps
            ],
        }


def modification_bound(schedule: Schedule, instance: Instance, t) -> Number:
    """``min m_i r_i / 2`` over the intervals ending at or after ``t``."""
    descs = describe_intervals(schedule, instance)
    return min(d.width * d.radius for d in descs[_suffix_at(descs, t):]) / 2


def apply_modification(schedule: Schedule, instance: Instance, t, epsilon, closed: bool = False) -> ModificationTrace:
    """Shift every end point from ``t`` on, propagating ``epsilon`` to the right.

    The result deliberately gives the first job ``p + epsilon`` units of work;
    every other job keeps its processing time.  ``closed`` admits ``|epsilon|``
    equal to the bound.
    """
    intervals = layout(schedule, instance)
    descs = [_describe(iv, schedule, instance) for iv in intervals]
    k = _suffix_at(descs, t)
    suffix = descs[k:]
    bound = min(d.width * d.radius for d in suffix) / 2
    size = abs(epsilon)
    if size == 0 or size > bound or (size == bound and not closed):
        raise TransformError(f"shift {epsilon} violates 0 < |eps| < {bound} (half the smallest width * radius)")

    steps: List[StepRecord] = []
    shifts = []
    eps_i = epsilon
    for idx, d in enumerate(suffix):
        last = idx == len(suffix) - 1
        case = BASE if last else (MAIN_II if d.synchronized else MAIN_I)
        if abs(eps_i) > d.factor * d.radius:
            raise TransformError(f"step {idx} is not doable: |{eps_i}| > {d.factor * d.radius}")
        shift = eps_i / d.factor
        after = 0 if last else _gain(instance, suffix[idx + 1].job, suffix[idx + 1].width)
        payoff = shift * (_gain(instance, d.job, d.width) - after)
        steps.append(StepRecord(idx, d.job, case, eps_i, shift, d.end, d.end + shift, payoff, d.factor * d.radius))
        shifts.append(shift)
        if not last:
            eps_i = eps_i * suffix[idx + 1].width / d.factor

    moved = list(intervals[:k])
    completion = dict(schedule.private_completion)
    for idx, d in enumerate(suffix):
        iv = intervals[k + idx]
        start = iv.start + (shifts[idx - 1] if idx else 0)
        moved.append(replace(iv, start=start, end=iv.end + shifts[idx]))
        if d.synchronized:
            completion[d.job] = completion[d.job] + shifts[idx]
    r = rate(schedule, instance, t)
    return ModificationTrace(t, epsilon, suffix[0].job, bound, r, tuple(steps), materialize(moved, completion))


def check_xi_valid(trace: ModificationTrace, original: Schedule, instance: Instance) -> List[str]:
    """Failures of the four structural properties of a modification result."""
    out = []
    tol = instance.tol
    s = trace.schedule
    for pc in s.pieces:
        if pc.end > s.private_completion[pc.job] + tol:
            out.append(f"(i) {pc.job!r} ends at {pc.end} on M{pc.machine} after its private completion")
    for job in instance.jobs:
        total = s.private_completion[job.id] + s.shared_amount(job.id)
        want = job.p + trace.epsilon if job.id == trace.job else job.p
        if not _same(total, want, tol):
            item = "(iii)" if job.id == trace.job else "(ii)"
            out.append(f"{item} {job.id!r} executes {total}, expected {want}")
    for v in validate(s, instance):
        if v.rule in ("eq2", "disjoint"):
            out.append(f"(iv) {v.message}")
    return out


# ------------------------------------------------------------------ splits


@dataclass(frozen=True)
class Split:
    job: JobId
    first: Interval
    second: Interval


def find_splits(schedule: Schedule, instance: Instance) -> List[Split]:
    """Consecutive intervals of one job lying in different segments, by right end."""
    by_job: Dict[JobId, List[Interval]] = {}
    for iv in layout(schedule, instance):
        by_job.setdefault(iv.job, []).append(iv)
    out = []
    for job, ivs in by_job.items():
        for a, b in zip(ivs, ivs[1:]):
            if a.segment != b.segment:
                out.append(Split(job, a, b))
    return sorted(out, key=lambda s: (s.second.end, s.first.end))


def rightmost_split(schedule: Schedule, instance: Instance) -> Optional[Split]:
    splits = find_splits(schedule, instance)
    return splits[-1] if splits else None


@dataclass(frozen=True)
class StepOutcome:
    schedule: Schedule
    epsilon: Number
    rate: Number
    before: Number
    after: Number
    predicted: Number  # predicted payoff change
    trace: Optional[ModificationTrace] = field(default=None, repr=False)


def transfer_bounds(schedule: Schedule, instance: Instance, split: Split) -> Tuple[Number, Number]:
    """Largest admissible ``|epsilon|`` for a negative and for a positive shift."""
    intervals = layout(schedule, instance)
    descs = [_describe(iv, schedule, instance) for iv in intervals]
    k = _suffix_at(descs, split.second.end)
    d0 = descs[k]
    common = min(
        split.first.length,
        split.second.length * d0.factor / (d0.factor + 1),
        min(d.width * d.radius for d in descs[k:]) / 2,
    )
    loads = machine_loads(schedule, instance.m) + [schedule.shared_makespan * 0]
    z = d0.width + 1
    # keeps processor z at least as busy as processor z + 1 after shortening it
    positive = min(common, loads[z - 1] - loads[z])
    return common, positive


def transfer(schedule: Schedule, instance: Instance, epsilon=None, split: Optional[Split] = None,
             closed: bool = False) -> StepOutcome:
    """Move ``epsilon`` of a split job between its two intervals, then re-sequence.

    ``epsilon < 0`` adds a piece next to the later interval on processor
    ``m_0 + 1`` and shortens the schedule; ``epsilon > 0`` trims the earlier
    interval on that processor.  Defaults to the rightmost split and half the
    largest admissible negative shift.
    """
    _require_feasible(schedule, instance)
    splits = find_splits(schedule, instance)
    if not splits:
        raise TransformError("schedule has no job split")
    if split is None:
        split = splits[-1]
    elif split not in splits:
        raise TransformError(f"{split!r} is not a split of this schedule")
    neg, pos = transfer_bounds(schedule, instance, split)
    if epsilon is None:
        epsilon = -neg / 2
    bound = pos if epsilon > 0 else neg
    size = abs(epsilon)
    if size == 0 or size > bound or (size == bound and not closed):
        raise TransformError(f"shift {epsilon} outside 0 < |eps| < {bound} for this split")

    job = split.job
    t = split.second.end
    r = rate(schedule, instance, t)
    z = split.second.width + 1
    trace = apply_modification(schedule, instance, t, epsilon, closed=closed)
    mid = trace.schedule
    pieces = list(mid.pieces)
    if epsilon > 0:
        y = split.first.end
        hits = [k for k, pc in enumerate(pieces) if pc.job == job and pc.machine == z and pc.end == y]
        if len(hits) != 1:
            raise InvariantBreach(f"no piece of {job!r} ends at {y} on M{z}")
        pc = pieces[hits[0]]
        pieces[hits[0]] = Piece(job, z, pc.start, y - epsilon) if y - epsilon > pc.start else None
        pieces = [p for p in pieces if p is not None]
    else:
        s0 = split.second.start
        pieces.append(Piece(job, z, s0, s0 - epsilon))
    patched = Schedule(mid.private_completion, tuple(pieces))
    out = make_sequential(patched, instance)

    before = _omega(schedule, instance)
    after = _omega(out, instance)
    predicted = epsilon * (r - instance.job(job).w + instance.cost(z))
    _check_identity("transfer payoff identity", after - before, predicted, instance)
    return StepOutcome(out, epsilon, r, before, after, predicted, trace)


# ----------------------------------------------------------- synchronization


def last_unsynchronized(schedule: Schedule, instance: Instance) -> Optional[JobId]:
    """Present job with the latest shared completion that does not finish privately then."""
    last: Dict[JobId, IntervalDescriptor] = {}
    for d in describe_intervals(schedule, instance):
        last[d.job] = d
    pending = [d for d in last.values() if not d.synchronized]
    if not pending:
        return None
    return max(pending, key=lambda d: d.end).job


def synchronization_bound(schedule: Schedule, instance: Instance, job) -> Number:
    descs = describe_intervals(schedule, instance)
    ends = [k for k, d in enumerate(descs) if d.job == job]
    if not ends:
        raise TransformError(f"{job!r} is not on the shared processors")
    k = ends[-1]
    d0 = descs[k]
    c = schedule.private_completion[job]
    return min(
        d0.width * (d0.end - d0.start),
        d0.width * (c - d0.end) / (d0.width + 1),
        min(d.width * d.radius for d in descs[k:]) / 2,
    )


def synchronize_job(schedule: Schedule, instance: Instance, job=None, epsilon=None,
                    closed: bool = False) -> StepOutcome:
    """One synchronization step for the last unsynchronized job.

    The sign of ``epsilon`` follows the rate at the job's end point; by default
    its size is half the admissible maximum.  The job's private completion
    moves by ``-epsilon``.
    """
    _require_feasible(schedule, instance)
    if find_splits(schedule, instance):
        raise TransformError("schedule has job splits; remove them first")
    target = last_unsynchronized(schedule, instance)
    if target is None:
        raise TransformError("every job on the shared processors is synchronized")
    if job is None:
        job = target
    elif job != target:
        raise TransformError(f"{job!r} is not the last unsynchronized job ({target!r} is)")
    descs = describe_intervals(schedule, instance)
    d0 = [d for d in descs if d.job == job][-1]
    r = rate(schedule, instance, d0.end)
    bound = synchronization_bound(schedule, instance, job)
    if epsilon is None:
        epsilon = bound / 2 if r > 0 else -bound / 2
    size = abs(epsilon)
    if size == 0 or size > bound or (size == bound and not closed):
        raise TransformError(f"shift {epsilon} outside 0 < |eps| < {bound} for synchronizing {job!r}")
    trace = apply_modification(schedule, instance, d0.end, epsilon, closed=closed)
    out = trace.schedule.with_private(job, schedule.private_completion[job] - epsilon)
    bad = validate(out, instance)
    if bad:
        raise InvariantBreach(f"synchronization produced an infeasible schedule: {bad[0].message}")
    before = _omega(schedule, instance)
    after = _omega(out, instance)
    _check_identity("synchronization payoff identity", after - before, epsilon * r, instance)
    return StepOutcome(out, epsilon, r, before, after, epsilon * r, trace)


# ------------------------------------------------------------------ filling


@dataclass(frozen=True)
class FillingOutcome:
    schedule: Schedule
    job: JobId
    first: JobId
    t: Number
    width: int
    before: Number
    after: Number

    @property
    def removed_first(self) -> bool:
        """The displaced job left the shared processors entirely."""
        return not any(pc.job == self.first for pc in self.schedule.pieces)


def _valid_suffix(intervals: List[Interval], descs, k: int, instance: Instance) -> bool:
    tail = intervals[k:]
    jobs = [iv.job for iv in tail]
    if len(set(jobs)) != len(jobs):
        return False
    if not all(d.synchronized for d in descs[k:]):
        return False
    ps = [instance.job(j).p for j in jobs]
    return all(a <= b for a, b in zip(ps, ps[1:]))


def j_filling(schedule: Schedule, instance: Instance, job, first=None) -> FillingOutcome:
    """Let ``job`` take over the start of the next synchronized suffix job.

    Either ``job`` is present, unsynchronized and immediately followed by a
    processing-time ordered synchronized suffix, or it is absent and the
    suffix starts before ``p_job``.  For an absent job the suffix start may be
    named with ``first``; otherwise the earliest valid suffix whose first job
    is at least as long as ``job`` is used.
    """
    _require_feasible(schedule, instance)
    intervals = layout(schedule, instance)
    descs = [_describe(iv, schedule, instance) for iv in intervals]
    own = [k for k, iv in enumerate(intervals) if iv.job == job]
    p_job = instance.job(job).p
    if own:
        kj = own[-1]
        if descs[kj].synchronized:
            raise TransformError(f"{job!r} is synchronized")
        k1 = kj + 1
        if k1 == len(intervals):
            raise TransformError(f"nothing follows {job!r} on the shared processors")
        if first is not None and intervals[k1].job != first:
            raise TransformError(f"{first!r} does not directly follow {job!r}")
    else:
        if first is not None:
            hits = [k for k, iv in enumerate(intervals) if iv.job == first]
            if not hits:
                raise TransformError(f"{first!r} is not on the shared processors")
            k1 = hits[0]
        else:
            options = [
                k for k, iv in enumerate(intervals)
                if iv.start < p_job and instance.job(iv.job).p >= p_job and _valid_suffix(intervals, descs, k, instance)
            ]
            if not options:
                raise TransformError(f"no synchronized processing-time ordered suffix fits {job!r}")
            k1 = options[0]
        if not intervals[k1].start < p_job:
            raise TransformError(f"suffix starts at {intervals[k1].start}, not before p = {p_job}")
    if not _valid_suffix(intervals, descs, k1, instance):
        raise TransformError("the jobs after the filling point are not a synchronized processing-time ordered suffix")

    head = intervals[k1]
    t1, t1_end, width = head.start, head.end, head.width
    c_job = schedule.private_completion[job]
    t = min(t1_end, (c_job + width * t1) / (1 + width))
    if not t > t1:
        raise TransformError(f"no room to fill: {job!r} cannot run past {t1}")
    moved = width * (t - t1)
    new = intervals[:k1] + [Interval(t1, t, job, width, head.segment)]
    if t < t1_end:
        new.append(replace(head, start=t))
    new.extend(intervals[k1 + 1:])
    completion = dict(schedule.private_completion)
    completion[job] = c_job - moved
    completion[head.job] = completion[head.job] + moved
    out = materialize(new, completion)
    bad = validate(out, instance)
    if bad:
        raise InvariantBreach(f"filling produced an infeasible schedule: {bad[0].message}")
    before, after = _omega(schedule, instance), _omega(out, instance)
    expected = moved * (instance.job(job).w - instance.job(head.job).w)
    _check_identity("filling payoff change", after - before, expected, instance)
    return FillingOutcome(out, job, head.job, t, width, before, after)


def j_filling_chain(schedule: Schedule, instance: Instance, job, first=None) -> List[FillingOutcome]:
    """Fill with ``job``, then with each displaced suffix job in turn.

    The first step must succeed; the chain stops at the first later step whose
    preconditions fail.
    """
    steps = [j_filling(schedule, instance, job, first)]
    while True:
        last = steps[-1]
        intervals = layout(last.schedule, instance)
        jobs = [iv.job for iv in intervals]
        displaced = last.first
        if displaced in jobs:
            k = max(i for i, j in enumerate(jobs) if j == displaced)
            if k + 1 >= len(jobs):
                break
            nxt = None
        else:
            after = [iv for iv in intervals if iv.start >= last.t]
            if not after or after[0].start >= instance.job(displaced).p:
                break
            nxt = after[0].job
        try:
            steps.append(j_filling(last.schedule, instance, displaced, nxt))
        except TransformError:
            break  # the displaced job does not meet the filling preconditions
    return steps


# ------------------------------------------------------------ canonicalize


@dataclass(frozen=True)
class CanonicalResult:
    schedule: Schedule
    log: Tuple[Tuple[str, Number, Number], ...]  # (operation, epsilon, payoff after)
    converged: bool


def canonicalize(schedule: Schedule, instance: Instance, max_steps: int = 200) -> CanonicalResult:
    """Best effort: sequentialize, remove splits, then synchronize right to left.

    Each step picks the shift sign that does not lower the payoff and takes
    the full admissible size.  Termination is not guaranteed, hence the cap.
    """
    current = make_sequential(schedule, instance)
    log: List[Tuple[str, Number, Number]] = [("make-sequential", 0 * _omega(current, instance), _omega(current, instance))]
    for _ in range(max_steps):
        split = rightmost_split(current, instance)
        if split is not None:
            r = rate(current, instance, split.second.end)
            slope = r - instance.job(split.job).w + instance.cost(split.second.width + 1)
            neg, pos = transfer_bounds(current, instance, split)
            if slope > 0 and pos > 0:
                eps = pos
            elif slope <= 0 and neg > 0:
                eps = -neg
            else:
                break
            step = transfer(current, instance, eps, split, closed=True)
            current = step.schedule
            log.append(("transfer", eps, step.after))
            continue
        job = last_unsynchronized(current, instance)
        if job is None:
            return CanonicalResult(current, tuple(log), True)
        bound = synchronization_bound(current, instance, job)
        descs = describe_intervals(current, instance)
        end = [d for d in descs if d.job == job][-1].end
        eps = bound if rate(current, instance, end) > 0 else -bound
        step = synchronize_job(current, instance, job, eps, closed=True)
        current = step.schedule
        log.append(("synchronize", eps, step.after))
    return CanonicalResult(current, tuple(log), False)
