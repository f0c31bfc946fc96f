"""Per-branch task rates, measured on isolated branch arrays."""
from __future__ import annotations

from dataclasses import dataclass

from ..dynamics.functions import FunctionId
from ..model.robot import RobotModel
from ..model.topology import BranchLayout, branch_decompose
from .costs import PipelineConfig
from .graph import build_branch_pipeline
from .sim import simulate


@dataclass(frozen=True)
class BranchRate:
    joints: tuple[int, ...]
    lanes: int
    ii: float  # cycles between completions once the array is full
    rate: float  # tasks per cycle

    @property
    def name(self) -> str:
        return "-".join(map(str, self.joints))


def branch_task_rates(model: RobotModel, function: FunctionId | str = FunctionId.DID,
                      layout: BranchLayout | None = None, config: PipelineConfig | None = None,
                      batch: int = 256) -> list[BranchRate]:
    """Simulate each branch of ``layout`` on its own, one lane, and report its rate."""
    layout = layout or branch_decompose(model)
    out = []
    for b, seq in enumerate(layout.branches):
        trace = simulate(build_branch_pipeline(model, seq, function, config), batch)
        ii = trace.steady_state_ii
        out.append(BranchRate(tuple(seq), layout.multiplexed[b], ii, 1.0 / ii))
    return out
