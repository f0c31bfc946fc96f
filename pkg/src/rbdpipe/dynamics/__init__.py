from .batch import TaskError, batch_evaluate
from .drnea import DerivativeBlocks, drnea
from .functions import (
    FunctionId,
    RobotState,
    dfd,
    difd,
    evaluate,
    fd,
    inverse_dynamics,
    mass_matrix,
    mass_matrix_inverse,
    random_states,
)
from .kinematics import link_transforms, world_wrenches_to_local
from .mminv import mminv_gen
from .rnea import DimensionError, DynamicsWorkspace, rnea
from .trig import trig_approx
