"""alpha-private schedules: the LA program, its flow form and extraction.

In an alpha-private schedule job ``j`` uses the shared processors only inside
``(0, alpha p_j)`` and finishes privately at ``(1 - alpha) p_j + r_j`` where
``r_j`` is the remainder.  With jobs sorted by processing time the shared
windows are ``(alpha p_{k-1}, alpha p_k)``, which gives the program::

    max   sum (w_j - c_i) x_jik
    s.t.  p_j / (2(m+1)) <= r_j <= alpha p_j
          sum_{j >= k} x_jik <= alpha (p_k - p_{k-1})
          sum_{i, k <= j} x_jik = alpha p_j - r_j
          x >= 0

The same program is a max-profit flow: source -> job -> (machine, window) ->
window capacity -> sink.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import simplex
from ._numbers import Number, as_float_text
from .core import Instance, JobId, Schedule, SynchronizedSchedule, expand
from .lp import LinearProgram, Row, pack_windows

logger = logging.getLogger(__name__)

CORRECTED = "corrected"
PAPER = "paper"


def alpha_of(m: int) -> Fraction:
    """``(2m + 3) / (4(m + 1))``."""
    if m < 1:
        raise ValueError(f"need at least one shared processor, got m = {m}")
    return Fraction(2 * m + 3, 4 * (m + 1))


def _alpha(instance: Instance):
    a = alpha_of(instance.m)
    return a if instance.exact else float(a)


def processing_order(instance: Instance) -> Tuple[JobId, ...]:
    """Jobs by processing time, ties by instance order."""
    return tuple(j.id for j in sorted(instance.jobs, key=lambda j: (j.p, instance.position(j.id))))


@dataclass(frozen=True)
class LaModel:
    instance: Instance
    order: Tuple[JobId, ...]
    alpha: Number
    program: LinearProgram
    t_index: Tuple[int, ...]
    x_index: Dict[Tuple[int, int, int], int]

    @property
    def breakpoints(self) -> Tuple[Number, ...]:
        """``alpha p_0 = 0, alpha p_1, ..., alpha p_n`` in processing order."""
        zero = self.instance._zero()
        return (zero,) + tuple(self.alpha * self.instance.job(j).p for j in self.order)

    @property
    def windows(self) -> List[Tuple[Number, Number]]:
        b = self.breakpoints
        return list(zip(b[:-1], b[1:]))

    def remainder_bounds(self, position: int) -> Tuple[Number, Number]:
        p = self.instance.job(self.order[position - 1]).p
        return p / (2 * (self.instance.m + 1)), self.alpha * p


def build_la(instance: Instance) -> LaModel:
    order = processing_order(instance)
    n, m = instance.n, instance.m
    alpha = _alpha(instance)
    zero = instance._zero()
    p = [zero] + [instance.job(j).p for j in order]

    names: List[str] = [f"r_{j}" for j in range(1, n + 1)]
    x_index: Dict[Tuple[int, int, int], int] = {}
    for j in range(1, n + 1):
        for i in range(1, m + 1):
            for k in range(1, j + 1):
                x_index[(j, i, k)] = len(names)
                names.append(f"x_{j}_{i}_{k}")
    t_index = tuple(range(n))

    rows: List[Row] = []
    for j in range(1, n + 1):
        rows.append(Row(f"rlo_{j}", "remainder", {t_index[j - 1]: 1}, ">=", p[j] / (2 * (m + 1))))
        rows.append(Row(f"rhi_{j}", "remainder", {t_index[j - 1]: 1}, "<=", alpha * p[j]))
    for i in range(1, m + 1):
        for k in range(1, n + 1):
            coeffs = {x_index[(j, i, k)]: 1 for j in range(k, n + 1)}
            rows.append(Row(f"cap_{i}_{k}", "capacity", coeffs, "<=", alpha * (p[k] - p[k - 1])))
    for j in range(1, n + 1):
        coeffs = {x_index[(j, i, k)]: 1 for i in range(1, m + 1) for k in range(1, j + 1)}
        coeffs[t_index[j - 1]] = 1
        rows.append(Row(f"done_{j}", "completion", coeffs, "=", alpha * p[j]))

    objective = {}
    for (j, i, k), col in x_index.items():
        coef = instance.job(order[j - 1]).w - instance.cost(i)
        if coef != 0:
            objective[col] = coef
    program = LinearProgram(tuple(names), objective, tuple(rows), instance.exact)
    return LaModel(instance, order, alpha, program, t_index, x_index)


@dataclass(frozen=True)
class LaSolution:
    """Remainders and shared amounts in processing order (1-based positions)."""

    model: LaModel
    objective: Number
    remainders: Tuple[Number, ...]
    amounts: Dict[Tuple[int, int, int], Number]
    backend: str
    capacity: Optional[str] = None

    def values(self) -> List[Number]:
        out = [self.model.instance._zero()] * len(self.model.program.names)
        for pos, r in enumerate(self.remainders):
            out[self.model.t_index[pos]] = r
        for key, col in self.model.x_index.items():
            out[col] = self.amounts.get(key, out[col])
        return out


def solve_la(model: LaModel) -> LaSolution:
    res = model.program.solve()
    if res.status != simplex.OPTIMAL:
        raise RuntimeError(f"LA program is {res.status}; r = alpha p, x = 0 is always feasible")
    remainders = tuple(res.values[c] for c in model.t_index)
    amounts = {key: res.values[col] for key, col in model.x_index.items()}
    return LaSolution(model, res.objective, remainders, amounts, "lp")


# ---------------------------------------------------------------- flow network


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    capacity: Optional[Number]  # None is unbounded
    profit: Number
    kind: str  # "source", "assign", "window", "sink"
    key: Tuple = ()


@dataclass(frozen=True)
class FlowNetwork:
    model: LaModel
    node_names: Tuple[str, ...]
    arcs: Tuple[Arc, ...]
    source: int
    sink: int
    capacity_variant: str

    @property
    def n_nodes(self) -> int:
        return len(self.node_names)

    def to_text(self) -> str:
        """Arc list: ``node_count arc_count`` then ``tail head capacity cost`` per arc.

        Costs are negated profits so a min-cost flow solver can consume it.
        """
        lines = [f"{self.n_nodes} {len(self.arcs)}"]
        for a in self.arcs:
            cap = "inf" if a.capacity is None else as_float_text(a.capacity)
            lines.append(f"{a.tail} {a.head} {cap} {as_float_text(-a.profit) if a.profit else '0'}")
        return "\n".join(lines) + "\n"


def source_capacity(p: Number, m: int, alpha: Number, paper_capacity: bool = False) -> Number:
    if paper_capacity:
        return m * p / (2 * (m + 1))
    # alpha p minus the smallest allowed remainder
    return alpha * p - p / (2 * (m + 1))


def build_flow(instance: Instance, paper_capacity: bool = False) -> FlowNetwork:
    model = build_la(instance)
    n, m = instance.n, instance.m
    names = ["s"] + [f"u_{j}" for j in range(1, n + 1)]
    v = {}
    vp = {}
    for i in range(1, m + 1):
        for k in range(1, n + 1):
            v[(i, k)] = len(names)
            names.append(f"v_{i}_{k}")
    for i in range(1, m + 1):
        for k in range(1, n + 1):
            vp[(i, k)] = len(names)
            names.append(f"v'_{i}_{k}")
    sink = len(names)
    names.append("t")

    zero = instance._zero()
    p = [zero] + [instance.job(j).p for j in model.order]
    arcs: List[Arc] = []
    for j in range(1, n + 1):
        cap = source_capacity(p[j], m, model.alpha, paper_capacity)
        arcs.append(Arc(0, j, cap, zero, "source", (j,)))
    for j in range(1, n + 1):
        w = instance.job(model.order[j - 1]).w
        for i in range(1, m + 1):
            for k in range(1, j + 1):
                arcs.append(Arc(j, v[(i, k)], None, w - instance.cost(i), "assign", (j, i, k)))
    for i in range(1, m + 1):
        for k in range(1, n + 1):
            arcs.append(Arc(v[(i, k)], vp[(i, k)], model.alpha * (p[k] - p[k - 1]), zero, "window", (i, k)))
    for i in range(1, m + 1):
        for k in range(1, n + 1):
            arcs.append(Arc(vp[(i, k)], sink, None, zero, "sink", (i, k)))
    variant = PAPER if paper_capacity else CORRECTED
    return FlowNetwork(model, tuple(names), tuple(arcs), 0, sink, variant)


@dataclass(frozen=True)
class FlowResult:
    flows: Tuple[Number, ...]  # one per arc of the network
    profit: Number
    augmentations: int


def solve_max_profit_flow(network: FlowNetwork) -> FlowResult:
    """Successive shortest paths on negated profits.

    Each round runs Bellman-Ford on the residual graph and augments along the
    cheapest path while its cost is negative, i.e. while it earns profit.
    The network is acyclic, so the residual graph never has a negative cycle.
    """
    inst = network.model.instance
    zero = inst._zero()
    eps = 0 if inst.exact else inst.tol
    arcs = network.arcs
    flows = [zero] * len(arcs)
    # residual edges: (arc index, forward?)
    out_edges: List[List[Tuple[int, bool]]] = [[] for _ in range(network.n_nodes)]
    for idx, a in enumerate(arcs):
        out_edges[a.tail].append((idx, True))
        out_edges[a.head].append((idx, False))

    def residual(idx: int, forward: bool):
        a = arcs[idx]
        if forward:
            return None if a.capacity is None else a.capacity - flows[idx]
        return flows[idx]

    profit = zero
    rounds = 0
    while True:
        dist: List[Optional[Number]] = [None] * network.n_nodes
        pred: List[Optional[Tuple[int, bool]]] = [None] * network.n_nodes
        dist[network.source] = zero
        for _ in range(network.n_nodes - 1):
            changed = False
            for node in range(network.n_nodes):
                if dist[node] is None:
                    continue
                for idx, forward in out_edges[node]:
                    r = residual(idx, forward)
                    if r is not None and r <= eps:
                        continue
                    a = arcs[idx]
                    nxt = a.head if forward else a.tail
                    cost = -a.profit if forward else a.profit
                    cand = dist[node] + cost
                    if dist[nxt] is None or cand < dist[nxt] - eps:
                        dist[nxt] = cand
                        pred[nxt] = (idx, forward)
                        changed = True
            if not changed:
                break
        d = dist[network.sink]
        if d is None or d >= -eps:
            break
        path = []
        node = network.sink
        while node != network.source:
            idx, forward = pred[node]
            path.append((idx, forward))
            node = arcs[idx].tail if forward else arcs[idx].head
        bottleneck = None
        for idx, forward in path:
            r = residual(idx, forward)
            if r is not None and (bottleneck is None or r < bottleneck):
                bottleneck = r
        assert bottleneck is not None and bottleneck > 0, "every s-t path has a finite capacity arc"
        for idx, forward in path:
            flows[idx] = flows[idx] + bottleneck if forward else flows[idx] - bottleneck
        profit += -d * bottleneck
        rounds += 1
    _check_flow(network, flows)
    return FlowResult(tuple(flows), profit, rounds)


def _check_flow(network: FlowNetwork, flows) -> None:
    inst = network.model.instance
    tol = inst.tol
    balance = [inst._zero()] * network.n_nodes
    for a, f in zip(network.arcs, flows):
        assert f >= -tol, "negative flow"
        assert a.capacity is None or f <= a.capacity + tol, "capacity exceeded"
        balance[a.tail] -= f
        balance[a.head] += f
    for node, b in enumerate(balance):
        if node not in (network.source, network.sink):
            assert abs(b) <= tol * max(1, network.n_nodes), f"flow not conserved at {network.node_names[node]}"


def flow_to_la(network: FlowNetwork, result: FlowResult) -> LaSolution:
    """``x_jik = f(u_j, v_ik)`` and ``r_j = alpha p_j - f(s, u_j)``."""
    model = network.model
    inst = model.instance
    out_of_source = {}
    amounts = {}
    for a, f in zip(network.arcs, result.flows):
        if a.kind == "source":
            out_of_source[a.key[0]] = f
        elif a.kind == "assign":
            amounts[a.key] = f
    remainders = tuple(model.alpha * inst.job(j).p - out_of_source[pos]
                       for pos, j in enumerate(model.order, start=1))
    return LaSolution(model, result.profit, remainders, amounts, "flow", network.capacity_variant)


def extract_alpha_private(solution: LaSolution) -> Schedule:
    """Pieces packed inside ``(alpha p_{k-1}, alpha p_k)``; ``C_j = (1 - alpha) p_j + r_j``."""
    model = solution.model
    inst = model.instance
    completion = {
        j: (1 - model.alpha) * inst.job(j).p + solution.remainders[pos]
        for pos, j in enumerate(model.order)
    }
    if not inst.exact:
        amounts = {k: v for k, v in solution.amounts.items() if v > inst.tol}
    else:
        amounts = solution.amounts
    return pack_windows(inst, model.order, model.windows, amounts, completion)


@dataclass(frozen=True)
class AlphaResult:
    schedule: Schedule
    objective: Number
    alpha: Number
    backend: str
    capacity: Optional[str]
    solution: LaSolution = field(repr=False)


def solve_alpha(instance: Instance, backend: str = "flow", paper_capacity: bool = False) -> AlphaResult:
    """Optimal alpha-private schedule via the LA program or its flow network.

    ``paper_capacity`` uses the literal source-arc capacity ``m p / (2(m+1))``
    instead of the one matching the remainder bounds; it is only meaningful
    for the flow backend.
    """
    if backend == "lp":
        if paper_capacity:
            raise ValueError("the literal source capacity only exists in the flow network")
        sol = solve_la(build_la(instance))
    elif backend == "flow":
        network = build_flow(instance, paper_capacity=paper_capacity)
        sol = flow_to_la(network, solve_max_profit_flow(network))
    else:
        raise ValueError(f"unknown backend {backend!r}; use 'lp' or 'flow'")
    schedule = extract_alpha_private(sol)
    return AlphaResult(schedule, sol.objective, sol.model.alpha, backend, sol.capacity, sol)


def is_alpha_private(schedule: Schedule, instance: Instance, alpha=None) -> bool:
    """``C_j >= alpha p_j`` and every shared piece ends by ``alpha p_j``."""
    if alpha is None:
        alpha = _alpha(instance)
    tol = instance.tol
    for job in instance.jobs:
        if schedule.private_completion[job.id] < alpha * job.p - tol:
            return False
    return all(pc.end <= alpha * instance.job(pc.job).p + tol for pc in schedule.pieces)


def witness_from_synchronized(model: LaModel, sync: SynchronizedSchedule) -> List[Number]:
    """Scaled copy of a synchronized schedule as an LA point.

    ``y_jik`` is the time job ``j`` spends on machine ``i`` inside
    ``(p_{k-1}, p_k)``; the point is ``x = alpha y`` and
    ``r_j = alpha (p_j - e_j)`` with ``e_j`` the job's total shared time.
    """
    inst = model.instance
    schedule = expand(sync, inst)
    zero = inst._zero()
    p = [zero] + [inst.job(j).p for j in model.order]
    pos = {j: k for k, j in enumerate(model.order, start=1)}
    values = [zero] * len(model.program.names)
    shared = {j: zero for j in model.order}
    for pc in schedule.pieces:
        j = pos[pc.job]
        shared[pc.job] += pc.length
        for k in range(1, inst.n + 1):
            common = min(pc.end, p[k]) - max(pc.start, p[k - 1])
            if common > 0:
                if k > j:
                    raise ValueError(f"{pc.job!r} runs past its own processing time")
                values[model.x_index[(j, pc.machine, k)]] += model.alpha * common
    for j, job_id in enumerate(model.order, start=1):
        values[model.t_index[j - 1]] = model.alpha * (p[j] - shared[job_id])
    return values


def shared_fraction_ok(sync: SynchronizedSchedule, instance: Instance) -> bool:
    """Every listed job does at most ``m p / (m+1)`` on shared processors."""
    m = instance.m
    for i, (job_id, width) in enumerate(sync.sequence, start=1):
        e = width * (sync.boundaries[i] - sync.boundaries[i - 1])
        if e > m * instance.job(job_id).p / (m + 1) + instance.tol:
            return False
    return True
