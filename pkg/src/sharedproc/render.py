"""Static Gantt charts as plain text or SVG.

One row per shared processor, then one row per private processor.  The time
axis is labelled at the breakpoints, the distinct end points of shared pieces.
Output depends only on the schedule, so equal inputs give identical bytes.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple
from xml.sax.saxutils import escape

from ._numbers import format_number
from .core import Instance, Schedule

_PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)
_SYMBOLS = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"


def breakpoints(schedule: Schedule) -> List:
    return sorted({pc.end for pc in schedule.pieces})


def time_label(x) -> str:
    """Short label: a terminating decimal when there is one, else ``a/b``."""
    if isinstance(x, Fraction):
        d = x.denominator
        while d % 2 == 0:
            d //= 2
        while d % 5 == 0:
            d //= 5
        if d == 1:
            text = f"{float(x):.6f}".rstrip("0").rstrip(".")
            if Fraction(text) == x:
                return text
        return str(format_number(x))
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _horizon(schedule: Schedule):
    ends = [pc.end for pc in schedule.pieces] + list(schedule.private_completion.values())
    return max(ends) if ends else 0


def _rows(schedule: Schedule, instance: Instance) -> List[Tuple[str, List[Tuple[object, object, object]]]]:
    rows = []
    for z in range(1, instance.m + 1):
        cells = sorted(((pc.start, pc.end, pc.job) for pc in schedule.on_machine(z)), key=lambda c: (c[0], c[1]))
        rows.append((f"M{z}", cells))
    for j in instance.ids:
        c = schedule.private_completion[j]
        rows.append((f"P[{j}]", [(instance._zero(), c, j)] if c > 0 else []))
    return rows


def _symbols(instance: Instance) -> Dict[object, str]:
    return {j: _SYMBOLS[k % len(_SYMBOLS)] for k, j in enumerate(instance.ids)}


def render_text(schedule: Schedule, instance: Instance, width: int = 72) -> str:
    horizon = _horizon(schedule)
    symbols = _symbols(instance)
    rows = _rows(schedule, instance)
    label_w = max(len(name) for name, _ in rows)
    scale = Fraction(width) / Fraction(horizon) if horizon else Fraction(0)

    def col(x) -> int:
        return min(width, int(Fraction(x) * scale)) if horizon else 0

    lines = []
    for name, cells in rows:
        bar = ["."] * width
        for start, end, job in cells:
            lo, hi = col(start), max(col(start) + 1, col(end))
            for k in range(lo, min(hi, width)):
                bar[k] = symbols[job]
        lines.append(f"{name.rjust(label_w)} |{''.join(bar)}|")
    ticks = [" "] * (width + 1)
    for t in breakpoints(schedule):
        ticks[col(t)] = "^"
    lines.append(f"{' ' * label_w} {''.join(ticks)}")
    marks = ", ".join(time_label(t) for t in breakpoints(schedule))
    lines.append(f"{' ' * label_w} breakpoints: {marks or '-'}; horizon {time_label(horizon)}")
    legend = "  ".join(f"{symbols[j]}={j}" for j in instance.ids)
    lines.append(f"{' ' * label_w} jobs: {legend}")
    return "\n".join(lines) + "\n"


def render_svg(schedule: Schedule, instance: Instance, px_per_unit: float = None, row_height: int = 24) -> str:
    horizon = _horizon(schedule)
    rows = _rows(schedule, instance)
    left, top, plot_w = 70, 20, 640
    scale = plot_w / float(horizon) if horizon else 0.0
    if px_per_unit is not None:
        scale = float(px_per_unit)
        plot_w = int(round(scale * float(horizon)))
    height = top + row_height * len(rows) + 40
    width = left + plot_w + 30
    colors = {j: _PALETTE[k % len(_PALETTE)] for k, j in enumerate(instance.ids)}

    def x(t) -> str:
        return f"{left + scale * float(t):.2f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
    ]
    for k, (name, cells) in enumerate(rows):
        y = top + k * row_height
        kind = "shared" if k < instance.m else "private"
        out.append(f'<text class="row-label" x="{left - 6}" y="{y + row_height * 0.65:.1f}" '
                   f'text-anchor="end">{escape(name)}</text>')
        for start, end, job in cells:
            out.append(
                f'<rect class="piece {kind}" x="{x(start)}" y="{y + 2}" '
                f'width="{scale * float(end - start):.2f}" height="{row_height - 4}" '
                f'fill="{colors[job]}" stroke="#333" stroke-width="0.5">'
                f'<title>{escape(str(job))}: {time_label(start)}-{time_label(end)}</title></rect>'
            )
    axis_y = top + row_height * len(rows) + 4
    out.append(f'<line class="axis" x1="{left}" y1="{axis_y}" x2="{x(horizon)}" y2="{axis_y}" stroke="#000"/>')
    for t in breakpoints(schedule):
        out.append(f'<line class="tick" x1="{x(t)}" y1="{top}" x2="{x(t)}" y2="{axis_y + 4}" '
                   f'stroke="#999" stroke-dasharray="2,2"/>')
        out.append(f'<text class="breakpoint" x="{x(t)}" y="{axis_y + 16}" '
                   f'text-anchor="middle">{escape(time_label(t))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(schedule: Schedule, instance: Instance, fmt: str = "text") -> str:
    if fmt == "text":
        return render_text(schedule, instance)
    if fmt == "svg":
        return render_svg(schedule, instance)
    raise ValueError(f"unknown format {fmt!r}; expected 'text' or 'svg'")


def layout_instance(widths: Sequence[int], times: Sequence) -> Tuple[Instance, "object"]:
    """Instance and synchronized schedule reproducing a given width/time layout.

    Processing times follow from ``t_i + m_i (t_i - t_{i-1}) = p``; weights are 1
    and costs 0 so the layout is the whole story.
    """
    from .core import SynchronizedSchedule

    prev = Fraction(0)
    jobs = []
    for k, (mi, t) in enumerate(zip(widths, times), start=1):
        t = Fraction(t)
        jobs.append((k, t + mi * (t - prev), 1))
        prev = t
    instance = Instance.create(jobs, [0] * max(widths))
    sync = SynchronizedSchedule(tuple((k, mi) for k, mi in enumerate(widths, start=1)),
                                (Fraction(0),) + tuple(Fraction(t) for t in times))
    return instance, sync
