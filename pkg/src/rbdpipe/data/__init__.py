"""Shipped reference models and the default pipeline calibration."""
from __future__ import annotations

from pathlib import Path

from ..model.robot import ModelError

ROOT = Path(__file__).parent
MODELS = ("iiwa", "quadruped_arm", "humanoid")


def model_path(name: str) -> Path:
    path = ROOT / "models" / f"{name}.json"
    if not path.exists():
        raise ModelError(f"{name!r} is neither a file nor a shipped model ({', '.join(MODELS)})")
    return path


def pipeline_config_path() -> Path:
    return ROOT / "pipeline_default.json"
