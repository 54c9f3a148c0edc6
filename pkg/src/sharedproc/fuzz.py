"""Random instances and schedules for property checks.

Every generator takes a ``random.Random`` so runs are reproducible from a seed.
Numbers are exact fractions with small denominators.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Tuple

from .core import Instance, Piece, Schedule, SynchronizedSchedule, expand

_DENOMINATORS = (1, 2, 3, 4, 5, 6, 8, 10)


def rational(rng: random.Random, lo, hi) -> Fraction:
    """Uniform-ish rational in ``[lo, hi]`` with a small denominator."""
    d = rng.choice(_DENOMINATORS)
    return Fraction(rng.randint(int(lo * d), int(hi * d)), d)


def _positive(rng, lo, hi) -> Fraction:
    x = rational(rng, lo, hi)
    return x if x > 0 else Fraction(1, rng.choice(_DENOMINATORS))


def random_instance(
    rng: random.Random,
    n: Optional[int] = None,
    m: Optional[int] = None,
    max_jobs: int = 5,
    max_machines: int = 3,
    p_range=(1, 20),
    w_range=(0, 10),
    c_range=(0, 10),
) -> Instance:
    n = n or rng.randint(1, max_jobs)
    m = m or rng.randint(1, max_machines)
    jobs = [(j, _positive(rng, *p_range), rational(rng, *w_range)) for j in range(1, n + 1)]
    costs = sorted(rational(rng, *c_range) for _ in range(m))
    return Instance.create(jobs, costs)


def random_antithetical_instance(rng: random.Random, n=None, m=None, max_jobs=5, max_machines=3,
                                 p_range=(1, 20), w_range=(0, 10), c_range=(0, 10)) -> Instance:
    """Sorted processing times paired with weights sorted the other way.

    Processing times are distinct, since equal ones would force equal weights.
    """
    n = n or rng.randint(1, max_jobs)
    m = m or rng.randint(1, max_machines)
    ps = set()
    while len(ps) < n:
        ps.add(_positive(rng, *p_range))
    ps = sorted(ps)
    ws = sorted((rational(rng, *w_range) for _ in range(n)), reverse=True)
    order = list(range(1, n + 1))
    rng.shuffle(order)  # ids are not aligned with the processing-time order
    jobs = [(order[k], ps[k], ws[k]) for k in range(n)]
    jobs.sort(key=lambda t: t[0])
    costs = sorted(rational(rng, *c_range) for _ in range(m))
    return Instance.create(jobs, costs)


def _finish(rng, n, m, pieces: List[Piece], tail_prob=0.5) -> Tuple[Instance, Schedule]:
    """Pick private completions not before each job's last piece, then derive ``p``."""
    completion = {}
    jobs = []
    for j in range(1, n + 1):
        mine = [pc for pc in pieces if pc.job == j]
        if mine:
            last = max(pc.end for pc in mine)
            extra = rational(rng, 0, 6) if rng.random() < tail_prob else Fraction(0)
            c = last + extra
            total = c + sum(pc.length for pc in mine)
        else:
            c = _positive(rng, 1, 20)
            total = c
        completion[j] = c
        jobs.append((j, total, rational(rng, 0, 10)))
    costs = sorted(rational(rng, 0, 10) for _ in range(m))
    return Instance.create(jobs, costs), Schedule(completion, tuple(pieces))


def random_feasible_schedule(
    rng: random.Random,
    n: Optional[int] = None,
    m: Optional[int] = None,
    max_jobs: int = 5,
    max_machines: int = 3,
    cost_ordered: bool = True,
) -> Tuple[Instance, Schedule]:
    """Arbitrary feasible schedule: gaps, interleaving, same-job overlap across processors.

    With ``cost_ordered`` the busiest processor is the cheapest one and so on,
    which is the case where sequentializing keeps the payoff unchanged.
    """
    n = n or rng.randint(1, max_jobs)
    m = m or rng.randint(1, max_machines)
    rows: List[List[Tuple[int, Fraction, Fraction]]] = []
    for _ in range(m):
        cursor = Fraction(0)
        row = []
        for _ in range(rng.randint(0, 2 * n)):
            if rng.random() < 0.4:
                cursor += rational(rng, 0, 3)
            length = _positive(rng, 0, 4)
            row.append((rng.randint(1, n), cursor, cursor + length))
            cursor += length
        rows.append(row)
    if cost_ordered:
        rows.sort(key=lambda r: -sum((e - s for _, s, e in r), Fraction(0)))
    pieces = [Piece(j, z, s, e) for z, row in enumerate(rows, start=1) for j, s, e in row]
    return _finish(rng, n, m, pieces)


def random_sequential_schedule(
    rng: random.Random,
    n: Optional[int] = None,
    m: Optional[int] = None,
    max_jobs: int = 5,
    max_machines: int = 3,
    splits: int = 0,
    sync_prob: float = 0.5,
) -> Tuple[Instance, Schedule]:
    """Processor-descending sequential schedule built from segments of decreasing width.

    ``splits`` jobs are made to reappear in a later segment.
    """
    if (m is not None and m < 2) or (n is not None and n < 2):
        splits = 0  # a split needs two segments
    m = m or rng.randint(max(1, 2 if splits else 1), max(max_machines, 2 if splits else 1))
    most = min(m, n) if n else m
    widths = sorted(rng.sample(range(1, m + 1), rng.randint(2 if splits else 1, most)), reverse=True)
    n = n or rng.randint(len(widths), max(max_jobs, len(widths)))
    ids = list(range(1, n + 1))
    rng.shuffle(ids)
    # every segment gets at least one job
    slots: List[List[int]] = [[] for _ in widths]
    free = list(ids)
    for seg in slots:
        seg.append(free.pop())
    for j in list(free):
        if rng.random() < 0.6:
            slots[rng.randrange(len(slots))].append(j)
            free.remove(j)
    for _ in range(splits):
        g = rng.randrange(len(slots) - 1)
        candidates = [j for j in slots[g] if not any(j in later for later in slots[g + 1:])]
        if not candidates:
            continue
        slots[rng.randrange(g + 1, len(slots))].append(rng.choice(candidates))
    for seg in slots:
        rng.shuffle(seg)
    pieces = []
    cursor = Fraction(0)
    for width, seg in zip(widths, slots):
        for j in seg:
            length = _positive(rng, 0, 4)
            pieces.extend(Piece(j, z, cursor, cursor + length) for z in range(1, width + 1))
            cursor += length
    return _finish(rng, n, m, pieces, tail_prob=1 - sync_prob)


def random_synchronized(rng: random.Random, instance: Instance, processing_ordered: bool = False,
                        keep: float = 0.7) -> SynchronizedSchedule:
    """Random feasible synchronized schedule over a subset of jobs."""
    ids = [j for j in instance.ids if rng.random() < keep] or [rng.choice(instance.ids)]
    if processing_ordered:
        ids.sort(key=lambda j: (instance.job(j).p, instance.position(j)))
    else:
        rng.shuffle(ids)
    widths = sorted((rng.randint(1, instance.m) for _ in ids), reverse=True)
    seq = []
    t = instance._zero()
    for j, width in zip(ids, widths):
        p = instance.job(j).p
        if p < t:
            continue
        seq.append((j, width))
        t = (p + width * t) / (1 + width)
    return SynchronizedSchedule.from_sequence(instance, seq)


def random_synchronized_schedule(rng: random.Random, instance: Instance, **kw) -> Schedule:
    return expand(random_synchronized(rng, instance, **kw), instance)


def epsilon_between(rng: random.Random, bound, negative: Optional[bool] = None) -> Fraction:
    """Nonzero shift strictly inside ``(-bound, bound)``."""
    u = Fraction(rng.randint(1, 99), 100)
    if negative is None:
        negative = rng.random() < 0.5
    return -bound * u if negative else bound * u
