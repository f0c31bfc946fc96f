from .joints import JointKind, JointType, MotionSubspace, Primitive, joint_transform, motion_subspace
from .robot import Link, ModelError, RobotModel, RootMode, load_model, model_from_dict, model_to_dict
from .topology import (
    BranchLayout,
    Reroot,
    ancestors,
    branch_decompose,
    reroot,
    sparsity_pattern,
    split_root,
    subtree,
    subtree_excl,
)
