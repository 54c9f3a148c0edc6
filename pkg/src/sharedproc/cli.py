"""Command-line front end.

Exit codes: 0 success, 1 schedule infeasible (``validate`` only), 2 bad input,
3 solver or transformation refused, 4 internal invariant breach.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from ._numbers import format_number
from .core import InfeasibleScheduleError, InvalidSynchronizedSchedule, StructureError, overlap_report, validate
from .errors import InvariantBreach, SolverRefusal, TransformError
from .estimators import ARITHMETIC, SOLVERS, check_instance, check_schedule, solve
from .io import InputError, dumps, load_instance, load_schedule, schedule_to_dict

logger = logging.getLogger("sharedproc")

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_REFUSED, EXIT_BREACH = 0, 1, 2, 3, 4
MODES = ("validate", "evaluate", "solve", "transform", "render", "fuzz")
OPS = ("make-sequential", "canonicalize", "modify")


@dataclass
class RunConfig:
    mode: str
    instance: Optional[Path] = None
    schedule: Optional[Path] = None
    out: Optional[Path] = None
    solver: Optional[str] = None
    arithmetic: str = "exact"
    paper_flow_capacity: bool = False
    max_jobs: int = 8
    op: Optional[str] = None
    max_steps: int = 200
    fmt: str = "text"
    seed: int = 0
    jobs: Optional[int] = None
    machines: Optional[int] = None
    count: int = 20
    checks: List[str] = field(default_factory=list)
    dump_lp: Optional[Path] = None
    dump_flow: Optional[Path] = None
    trace: Optional[Path] = None
    at: Optional[str] = None
    epsilon: Optional[str] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "solve" and self.solver not in SOLVERS:
            raise ValueError(f"solve needs a solver from {SOLVERS}")
        if self.arithmetic not in ARITHMETIC:
            raise ValueError(f"arithmetic must be one of {ARITHMETIC}")
        if self.mode == "transform" and self.op not in OPS:
            raise ValueError(f"transform needs an op from {OPS}")


def _num(x):
    return format_number(x) if x is not None else None


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _inputs(config: RunConfig, need_schedule: bool):
    instance, _ = load_instance(config.instance)
    instance = check_instance(instance, config.arithmetic)
    schedule = load_schedule(config.schedule, instance) if need_schedule else None
    return instance, schedule


def _validate(config: RunConfig) -> int:
    instance, schedule = _inputs(config, True)
    problems = validate(schedule, instance)
    report = {"feasible": not problems,
              "violations": [{"rule": v.rule, "job": v.job, "machine": v.machine,
                              "magnitude": _num(v.magnitude), "message": v.message} for v in problems]}
    _emit(dumps(report), config.out)
    return EXIT_OK if not problems else EXIT_INFEASIBLE


def _evaluate(config: RunConfig) -> int:
    instance, schedule = _inputs(config, True)
    check_schedule(schedule, instance)
    rep = overlap_report(schedule, instance)
    per_job = {}
    for (job, machine), amount in sorted(rep.per_job_per_machine.items(), key=lambda kv: (instance.position(kv[0][0]), kv[0][1])):
        per_job.setdefault(str(job), {})[f"M{machine}"] = _num(amount)
    _emit(dumps({"objective": _num(rep.total_weighted), "overlap": per_job}), config.out)
    return EXIT_OK


def _solve(config: RunConfig) -> int:
    instance, _ = _inputs(config, False)
    report = solve(instance, config.solver, config.arithmetic,
                   paper_flow_capacity=config.paper_flow_capacity, max_jobs=config.max_jobs)
    summary = {
        "solver": report.solver,
        "arithmetic": report.arithmetic,
        "objective": _num(report.objective),
        "alpha": _num(report.alpha),
        "capacity": report.capacity,
    }
    if report.detail:
        summary["detail"] = report.detail
    _dumps(config, instance, report)
    if config.out is not None:
        _emit(dumps(schedule_to_dict(report.schedule)), config.out)
        summary["schedule_file"] = str(config.out)
        sys.stdout.write(dumps(summary))
    else:
        summary["schedule"] = schedule_to_dict(report.schedule)
        sys.stdout.write(dumps(summary))
    return EXIT_OK


def _dumps(config: RunConfig, instance, report) -> None:
    from .alpha import build_flow, build_la
    from .lp import build_compatible_lp

    instance = check_instance(instance, config.arithmetic)
    if config.dump_lp is not None:
        if config.solver in ("exact", "antithetical"):
            program = build_compatible_lp(instance, report.detail["permutation"]).program
        elif config.solver == "alpha-lp":
            program = build_la(instance).program
        else:
            raise InputError(f"--dump-lp needs an LP-based solver, not {config.solver}")
        Path(config.dump_lp).write_text(program.to_lp_text(), encoding="utf-8")
    if config.dump_flow is not None:
        if config.solver != "alpha-flow":
            raise InputError("--dump-flow needs --solver alpha-flow")
        network = build_flow(instance, paper_capacity=config.paper_flow_capacity)
        Path(config.dump_flow).write_text(network.to_text(), encoding="utf-8")


def _modify(config: RunConfig, instance, schedule) -> int:
    from ._numbers import parse_number
    from .structure import apply_modification

    if config.at is None or config.epsilon is None:
        raise InputError("--op modify needs --at and --epsilon")
    try:
        at = parse_number(config.at, instance.exact)
        eps = parse_number(config.epsilon, instance.exact)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError("--at and --epsilon must be numbers or 'a/b' strings") from None
    trace = apply_modification(schedule, instance, at, eps).to_dict()
    _emit(dumps(trace), config.trace or config.out)
    return EXIT_OK


def _transform(config: RunConfig) -> int:
    from .core import payoff
    from .structure import canonicalize, make_sequential, relabel_gain

    instance, schedule = _inputs(config, True)
    check_schedule(schedule, instance)
    if config.op == "modify":
        return _modify(config, instance, schedule)
    before = payoff(schedule, instance)
    summary = {"op": config.op, "before": _num(before)}
    if config.op == "make-sequential":
        gain = relabel_gain(schedule, instance)
        result = make_sequential(schedule, instance)
        after = payoff(result, instance)
        if after != before + gain:
            raise InvariantBreach(f"make-sequential changed the payoff from {before} to {after}")
        summary["relabel_gain"] = _num(gain)
    else:
        outcome = canonicalize(schedule, instance, max_steps=config.max_steps)
        result = outcome.schedule
        after = payoff(result, instance)
        summary["converged"] = outcome.converged
        summary["steps"] = len(outcome.log)
        if config.trace is not None:
            log = [{"op": op, "epsilon": _num(eps), "payoff": _num(value)} for op, eps, value in outcome.log]
            Path(config.trace).write_text(dumps(log), encoding="utf-8")
    summary["after"] = _num(after)
    if config.out is not None:
        _emit(dumps(schedule_to_dict(result)), config.out)
    else:
        summary["schedule"] = schedule_to_dict(result)
    sys.stdout.write(dumps(summary))
    return EXIT_OK


def _render(config: RunConfig) -> int:
    from .render import render

    instance, schedule = _inputs(config, True)
    check_schedule(schedule, instance)
    _emit(render(schedule, instance, config.fmt), config.out)
    return EXIT_OK


def _fuzz(config: RunConfig) -> int:
    from .harness import CHECKS, run_checks

    names = config.checks or list(CHECKS)
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        raise InputError(f"unknown checks {unknown}; available: {sorted(CHECKS)}")
    try:
        results = run_checks(config.seed, config.count, config.jobs, config.machines, names)
    except (InvariantBreach, SolverRefusal):
        raise
    except (TransformError, InfeasibleScheduleError) as exc:
        # generated inputs are valid by construction, so this is our fault, not the user's
        raise InvariantBreach(f"property check crashed: {exc}") from exc
    for name, counts in results.items():
        sys.stdout.write(f"{name}: {counts['passed']} passed, {counts['skipped']} skipped\n")
    return EXIT_OK


_HANDLERS = {
    "validate": _validate,
    "evaluate": _evaluate,
    "solve": _solve,
    "transform": _transform,
    "render": _render,
    "fuzz": _fuzz,
}


def run(config: RunConfig) -> int:
    try:
        return _HANDLERS[config.mode](config)
    except (InputError, StructureError, InfeasibleScheduleError, InvalidSynchronizedSchedule) as exc:
        logger.error("input error: %s", exc)
        return EXIT_INPUT
    except (SolverRefusal, TransformError) as exc:
        logger.error("refused: %s", exc)
        return EXIT_REFUSED
    except InvariantBreach as exc:
        logger.error("invariant breach: %s", exc)
        return EXIT_BREACH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sharedproc", description="Shared-processor scheduling toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="mode", required=True)

    def files(p, schedule=True):
        p.add_argument("instance", type=Path, help="instance JSON file")
        if schedule:
            p.add_argument("schedule", type=Path, help="schedule JSON file")
        p.add_argument("--arith", dest="arithmetic", choices=ARITHMETIC, default="exact")
        p.add_argument("-o", "--out", type=Path, help="write the main output here instead of stdout")

    files(sub.add_parser("validate", help="check feasibility of a schedule"))
    files(sub.add_parser("evaluate", help="total weighted overlap of a schedule"))

    p = sub.add_parser("solve", help="compute a schedule")
    files(p, schedule=False)
    p.add_argument("--solver", choices=SOLVERS, required=True)
    p.add_argument("--paper-flow-capacity", action="store_true",
                   help="use the uncorrected source capacities in the flow network")
    p.add_argument("--max-jobs", type=int, default=8, help="size guard for the exact search")
    p.add_argument("--dump-lp", type=Path, help="write the LP that was solved in LP text format")
    p.add_argument("--dump-flow", type=Path, help="write the flow network as an arc list")

    p = sub.add_parser("transform", help="rewrite a schedule without losing payoff")
    files(p)
    p.add_argument("--op", choices=OPS, required=True)
    p.add_argument("--max-steps", type=int, default=200)
    p.add_argument("--at", help="modify: interval end point where the shift starts")
    p.add_argument("--epsilon", help="modify: size of the shift")
    p.add_argument("--trace", type=Path, help="write the step log (canonicalize) or trace (modify) as JSON")

    p = sub.add_parser("render", help="Gantt chart of a schedule")
    files(p)
    p.add_argument("--format", dest="fmt", choices=("text", "svg"), default="text")

    p = sub.add_parser("fuzz", help="run randomized property checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, help="jobs per instance (default: random 1..5)")
    p.add_argument("--machines", type=int, help="shared processors (default: random 1..3)")
    p.add_argument("--count", type=int, default=20, help="samples per check")
    p.add_argument("--check", dest="checks", action="append", default=[], help="run only this check")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    return RunConfig(**fields)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        config = config_from_args(args)
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_INPUT
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
