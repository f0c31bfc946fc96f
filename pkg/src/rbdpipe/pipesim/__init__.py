"""Cycle-approximate simulation of per-joint dynamics pipelines."""
from .costs import PipelineConfig, StageCost, StageKind, cost_model
from .graph import Edge, PipelineGraph, StageSpec, build_branch_pipeline, build_pipeline, chain_pipeline
from .rates import BranchRate, branch_task_rates
from .report import read_jsonl, records, report, summary_text, write_jsonl
from .scheduler import Task, TaskGraphError, TaskSet, schedule_tasks, topological_order
from .sim import DeadlockError, TraceReport, simulate

__all__ = [
    "PipelineConfig", "StageCost", "StageKind", "cost_model",
    "Edge", "PipelineGraph", "StageSpec", "build_branch_pipeline", "build_pipeline", "chain_pipeline",
    "BranchRate", "branch_task_rates",
    "read_jsonl", "records", "report", "summary_text", "write_jsonl",
    "Task", "TaskGraphError", "TaskSet", "schedule_tasks", "topological_order",
    "DeadlockError", "TraceReport", "simulate",
]
