"""Replay reporting: delimited records, a text table, and a figure.

``write_report`` renders three artifacts into a directory:

* ``report.jsonl`` — one JSON line per replayed case, full detail;
* ``report.txt`` — per-task solve table, bite cadence, reference notes;
* ``attempts_histogram.png`` — solved cases stacked by attempt number.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ..robot_sim import BITE_DELIVERED, TraceEvent
from .corpus import TASKS
from .replay import CaseOutcome, summarize

# Context from the original human study (self-reported success); shown in
# the text report for comparison only — replay outcomes never gate on them.
REFERENCE_NOTES = (
    "t1: 6/11 participants solved it on the first attempt",
    "t4: 9/11 participants solved it within three attempts",
    "t5: 11/11 participants solved it within three attempts",
)


@dataclass(frozen=True)
class BiteStats:
    """Cadence of delivered bites: mean/SD of the intervals between them."""

    mean: float
    sd: float
    bites: int


def bite_stats_from_times(times: list[float]) -> BiteStats | None:
    """Interval statistics for one run's bite timestamps (needs >= 2)."""
    if len(times) < 2:
        return None
    intervals = [b - a for a, b in zip(times, times[1:])]
    return BiteStats(
        mean=statistics.fmean(intervals),
        sd=statistics.pstdev(intervals),
        bites=len(times),
    )


def bite_stats_from_trace(trace: list[TraceEvent]) -> BiteStats | None:
    return bite_stats_from_times([e.t for e in trace if e.kind == BITE_DELIVERED])


def pooled_bite_stats(outcomes: list[CaseOutcome]) -> BiteStats | None:
    """Pool bite intervals across all successful attempts."""
    intervals: list[float] = []
    bites = 0
    for outcome in outcomes:
        for attempt in outcome.attempts:
            if attempt.success and len(attempt.bite_times) >= 2:
                times = attempt.bite_times
                intervals.extend(b - a for a, b in zip(times, times[1:]))
                bites += len(times)
    if not intervals:
        return None
    return BiteStats(
        mean=statistics.fmean(intervals), sd=statistics.pstdev(intervals), bites=bites
    )


def format_bite_stats(stats: BiteStats) -> str:
    """Human-readable cadence, e.g. ``38±7 s between bites (12 bites)``."""
    return f"{round(stats.mean)}±{round(stats.sd)} s between bites ({stats.bites} bites)"


def _task_order(metrics: dict) -> list[str]:
    present = list(metrics["per_task"])
    return [t for t in TASKS if t in present] + [t for t in present if t not in TASKS]


def render_text_report(outcomes: list[CaseOutcome], metrics: dict) -> str:
    lines = ["Corpus replay report", "=" * 20, ""]
    header = f"{'task':<10}{'cases':>6}{'solved':>8}{'rate':>7}{'@1':>5}{'@2':>5}{'@3':>5}"
    lines.append(header)
    lines.append("-" * len(header))
    rows = [(task, metrics["per_task"][task]) for task in _task_order(metrics)]
    rows.append(("overall", metrics["overall"]))
    for name, bucket in rows:
        rate = bucket["solved"] / bucket["cases"] if bucket["cases"] else 0.0
        hist = bucket["attempt_histogram"]
        lines.append(
            f"{name:<10}{bucket['cases']:>6}{bucket['solved']:>8}{rate:>7.0%}"
            f"{hist[1]:>5}{hist[2]:>5}{hist[3]:>5}"
        )
    lines.append("")
    stats = pooled_bite_stats(outcomes)
    if stats is not None:
        lines.append(f"Bite cadence: {format_bite_stats(stats)}")
        lines.append("")
    lines.append("Reference (human study, self-reported success):")
    for note in REFERENCE_NOTES:
        lines.append(f"  {note}")
    lines.append("These lines are context only; they do not gate this replay.")
    lines.append("")
    return "\n".join(lines)


def render_histogram(metrics: dict, path: Path) -> None:
    """Solved cases per task, stacked by the attempt that solved them."""
    tasks = _task_order(metrics)
    fig, ax = plt.subplots(figsize=(7, 4))
    bottoms = [0] * len(tasks)
    colors = {1: "#2b8cbe", 2: "#a6bddb", 3: "#ece7f2"}
    for attempt in (1, 2, 3):
        counts = [metrics["per_task"][t]["attempt_histogram"][attempt] for t in tasks]
        ax.bar(
            tasks,
            counts,
            bottom=bottoms,
            label=f"attempt {attempt}",
            color=colors[attempt],
            edgecolor="#333333",
        )
        bottoms = [b + c for b, c in zip(bottoms, counts)]
    ax.set_ylabel("solved cases")
    ax.set_title("Solved cases by attempt")
    ax.legend()
    ax.set_ylim(0, max(bottoms + [1]) + 1)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(outcomes: list[CaseOutcome], out_dir: str | Path) -> dict:
    """Render all report artifacts; returns their paths and the metrics."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics = summarize(outcomes)

    jsonl_path = out_dir / "report.jsonl"
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for outcome in outcomes:
            fh.write(json.dumps(outcome.to_jsonable(), ensure_ascii=False) + "\n")

    text_path = out_dir / "report.txt"
    text_path.write_text(render_text_report(outcomes, metrics), encoding="utf-8")

    figure_path = out_dir / "attempts_histogram.png"
    render_histogram(metrics, figure_path)

    return {
        "jsonl": jsonl_path,
        "text": text_path,
        "figure": figure_path,
        "metrics": metrics,
    }
