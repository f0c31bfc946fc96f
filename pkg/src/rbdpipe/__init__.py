"""Rigid-body dynamics kernels for kinematic trees, with a pipeline simulator."""
from .dynamics import FunctionId, RobotState, batch_evaluate, evaluate
from .model import RobotModel, load_model

__version__ = "0.1.0"

__all__ = ["FunctionId", "RobotModel", "RobotState", "batch_evaluate", "evaluate", "load_model", "__version__"]
