"""Plain-text and line-delimited JSON summaries of a :class:`TraceReport`."""
from __future__ import annotations

import json
from typing import Iterable, Iterator

from .sim import TraceReport


def records(trace: TraceReport, *, tasks: bool = True) -> Iterator[dict]:
    """One ``summary`` record, then ``stage``, ``fifo`` and (optionally) ``task`` records.

    The summary's totals are the sums of the part records.
    """
    lat = trace.latencies
    yield {
        "record": "summary",
        "tasks": trace.n_tasks,
        "makespan": trace.makespan,
        "throughput_per_kcycle": trace.throughput,
        "steady_state_ii": trace.steady_state_ii if trace.n_tasks > 1 else None,
        "latency_min": min(lat) if lat else None,
        "latency_mean": sum(lat) / len(lat) if lat else None,
        "latency_max": max(lat) if lat else None,
        "busy_total": sum(trace.busy.values()),
        "accepts_total": sum(trace.accepts.values()),
        "stages": len(trace.busy),
        "fifos": len(trace.fifo_high_water),
    }
    for name, busy in trace.busy.items():
        yield {"record": "stage", "stage": name, "id": trace.stage_ids[name], "busy": busy,
               "accepts": trace.accepts[name], "utilization": trace.utilization(name)}
    for name, hw in trace.fifo_high_water.items():
        yield {"record": "fifo", "fifo": name, "high_water": hw}
    if tasks:
        for tid in sorted(trace.finish):
            yield {"record": "task", "task": tid, "issue": trace.issue[tid], "finish": trace.finish[tid],
                   "latency": trace.finish[tid] - trace.issue[tid]}


def write_jsonl(trace: TraceReport, fh, *, tasks: bool = True) -> int:
    n = 0
    for rec in records(trace, tasks=tasks):
        fh.write(json.dumps(rec) + "\n")
        n += 1
    return n


def read_jsonl(lines: Iterable[str]) -> list[dict]:
    return [json.loads(line) for line in lines if line.strip()]


def summary_text(trace: TraceReport, top: int = 5) -> str:
    lat = trace.latencies
    lines = [
        f"tasks         {trace.n_tasks}",
        f"makespan      {trace.makespan} cycles",
        f"throughput    {trace.throughput:.3f} tasks/kcycle",
    ]
    if lat:
        lines.append(f"latency       min {min(lat)}  mean {sum(lat) / len(lat):.1f}  max {max(lat)} cycles")
    if trace.n_tasks > 1:
        lines.append(f"steady II     {trace.steady_state_ii:.2f} cycles")
    busiest = sorted(trace.busy, key=lambda s: (-trace.busy[s], trace.stage_ids[s]))[:top]
    lines.append("busiest stages:")
    lines += [f"  {s:<28} {trace.utilization(s):6.1%}  ({trace.busy[s]} busy cycles)" for s in busiest]
    deepest = sorted(trace.fifo_high_water.items(), key=lambda kv: -kv[1])[:top]
    lines.append("deepest FIFOs:")
    lines += [f"  {name:<40} {hw}" for name, hw in deepest]
    return "\n".join(lines)


def report(trace: TraceReport) -> tuple[str, list[dict]]:
    """Human-readable text and machine-readable records for ``trace``."""
    return summary_text(trace), list(records(trace))
