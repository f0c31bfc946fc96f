"""Link placements and conversion of world-frame wrenches to link frames."""
from __future__ import annotations

import numpy as np

from ..model.robot import RobotModel
from ..spatial import SpatialTransform, _cross3, _mv3
from .rnea import check_vector, joint_xform
from .trig import trig_approx


def link_transforms(model: RobotModel, q) -> list[SpatialTransform]:
    """World-to-link motion transforms ``iX0``, one per link.

    A link without a joint of its own (a fixed root, or the base of a
    state-injected model) sits at the base frame.
    """
    q = check_vector(model, q, "q")
    s, c = trig_approx(q)
    tree = model.tree
    batch = q.shape[:-1]
    node = []
    for k in range(tree.n):
        Xk = joint_xform(tree, k, q, s, c)
        p = tree.parent[k]
        node.append(Xk if p < 0 else Xk.compose(node[p]))
    base = SpatialTransform.identity(batch)
    return [base if f < 0 else node[f] for f in tree.link_frame]


def wrench_to_link(X: SpatialTransform, f):
    """``X^* f``: a wrench given about the origin of the outer frame, in the inner frame."""
    n, fl = f[..., :3], f[..., 3:]
    return np.concatenate([_mv3(X.rotation, n - _cross3(X.translation, fl)), _mv3(X.rotation, fl)], axis=-1)


def world_wrenches_to_local(model: RobotModel, q, f_world):
    """Convert per-link external wrenches from world coordinates (moment about
    the world origin first, then force) to the link-frame ``f_ext`` that the
    dynamics functions read."""
    f_world = np.asarray(f_world, float)
    if f_world.shape[-2:] != (model.n_bodies, 6):
        raise ValueError(f"f_world must have trailing shape ({model.n_bodies}, 6)")
    Xs = link_transforms(model, q)
    return np.stack([wrench_to_link(X, f_world[..., i, :]) for i, X in enumerate(Xs)], axis=-2)
