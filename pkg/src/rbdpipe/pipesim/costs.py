"""Per-stage cycle costs and the pipeline configuration file."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from enum import Enum
from pathlib import Path

from ..model.joints import JointType


class StageKind(str, Enum):
    RF = "Rf"
    RB = "Rb"
    DF = "Df"
    DB = "Db"
    MB = "Mb"
    MF = "Mf"
    BROADCAST = "Broadcast"
    REDUCE = "Reduce"
    TRIG = "Trig"
    SCHEDULE = "Schedule"
    FEEDBACK = "Feedback"


@dataclass(frozen=True)
class PipelineConfig:
    """Cost coefficients, FIFO sizing and scheduling policy.

    Derivative stages cost ``d_intercept + d_slope * depth * dof`` cycles per
    task; RNEA and mass-matrix stages cost ``base + per_dof * dof`` with a
    cheaper per-DOF rate for one-hot joints.  Stage latency is the initiation
    interval plus ``fill``.
    """

    d_intercept: float = 0.0
    d_slope: float = 1.0
    r_base: int = 1
    r_per_dof: int = 3
    r_per_dof_cheap: int = 2
    m_base: int = 1
    m_per_dof: int = 3
    m_per_dof_cheap: int = 2
    fill: int = 2
    trig_ii: int = 1
    trig_latency: int = 2
    link_ii: int = 1  # Broadcast / Reduce / Feedback
    link_latency: int = 1
    schedule_ii: int = 1
    schedule_latency: int = 1
    pass_ii: int = 1  # stages switched off for a micro-instruction
    pass_latency: int = 1
    fifo_capacity: int = 2
    source_ii: int = 1
    policy: str = "greedy"

    def __post_init__(self):
        if self.fifo_capacity < 1:
            raise ValueError("fifo_capacity must be >= 1")
        if self.policy not in ("greedy", "in_order"):
            raise ValueError(f"unknown policy {self.policy!r}; use 'greedy' or 'in_order'")
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, (int, float)) and not isinstance(v, bool) and v < 0:
                raise ValueError(f"{f.name} must be non-negative")
        for name in ("trig_ii", "link_ii", "schedule_ii", "pass_ii", "source_ii"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown pipeline config keys: {', '.join(sorted(extra))}")
        return cls(**doc)

    @classmethod
    def load(cls, path=None) -> "PipelineConfig":
        if path is None:
            from ..data import pipeline_config_path

            path = pipeline_config_path()
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StageCost:
    latency: int
    initiation_interval: int


def cost_model(joint: JointType | None, depth: int, kind: StageKind | str,
               config: PipelineConfig | None = None) -> StageCost:
    """Cycle cost of one submodule for one task."""
    config = config or PipelineConfig()
    kind = StageKind(kind)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    dof = joint.dof if joint is not None else 0
    cheap = joint is not None and joint.one_hot
    if kind in (StageKind.DF, StageKind.DB):
        ii = config.d_intercept + config.d_slope * depth * dof
    elif kind in (StageKind.RF, StageKind.RB):
        ii = config.r_base + (config.r_per_dof_cheap if cheap else config.r_per_dof) * dof
    elif kind in (StageKind.MB, StageKind.MF):
        ii = config.m_base + (config.m_per_dof_cheap if cheap else config.m_per_dof) * dof
    elif kind is StageKind.TRIG:
        return StageCost(max(config.trig_latency, config.trig_ii), config.trig_ii)
    elif kind is StageKind.SCHEDULE:
        return StageCost(max(config.schedule_latency, config.schedule_ii), config.schedule_ii)
    else:
        return StageCost(max(config.link_latency, config.link_ii), config.link_ii)
    ii = max(1, int(math.ceil(ii)))
    return StageCost(ii + config.fill, ii)


def pass_cost(config: PipelineConfig) -> StageCost:
    return StageCost(max(config.pass_latency, config.pass_ii), config.pass_ii)
