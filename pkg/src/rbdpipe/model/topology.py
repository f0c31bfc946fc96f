"""Tree queries and the topology transforms used to lay out pipelines."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from ..spatial import SpatialInertia, SpatialTransform, inertia_transform
from .joints import JointKind, JointType
from .robot import Link, ModelError, RobotModel, RootMode, _validated


def _check(model: RobotModel, i: int):
    if not 0 <= i < model.n_bodies:
        raise ModelError(f"link id {i} out of range [0, {model.n_bodies})")


def subtree(model: RobotModel, i: int) -> list[int]:
    """``tree(i)``: link ``i`` and all its descendants, ascending."""
    _check(model, i)
    out, stack = [], [i]
    while stack:
        j = stack.pop()
        out.append(j)
        stack.extend(model.children[j])
    return sorted(out)


def subtree_excl(model: RobotModel, i: int) -> list[int]:
    return [j for j in subtree(model, i) if j != i]


def ancestors(model: RobotModel, i: int) -> list[int]:
    """Strict ancestors of ``i``, ascending."""
    _check(model, i)
    out, j = [], model.links[i].parent
    while j >= 0:
        out.append(j)
        j = model.links[j].parent
    return out[::-1]


def sparsity_pattern(model: RobotModel) -> np.ndarray:
    """DOF-level mask of entries coupled through the tree: ``j`` in
    ``ancestors(i) ∪ tree(i)``."""
    n = model.n_dof
    out = np.zeros((n, n), dtype=bool)
    for i in range(model.n_bodies):
        si = model.dof_slice(i)
        for j in ancestors(model, i) + subtree(model, i):
            out[si, model.dof_slice(j)] = True
    return out


# --------------------------------------------------------------------------
# branch decomposition

@dataclass
class BranchLayout:
    """Root array plus branch arrays.

    ``branches[b]`` is the representative joint sequence of hardware array
    ``b``; ``instances[b]`` lists every limb served by that array (the
    representative first) and ``multiplexed[b]`` is their count.  ``attach[b]``
    is the link the branch hangs from (-1 for the world).
    """

    root_joints: tuple[int, ...]
    branches: list[tuple[int, ...]]
    instances: list[list[tuple[int, ...]]]
    multiplexed: dict[int, int]
    attach: list[int]
    depth: dict[int, int] = field(default_factory=dict)

    def all_joints(self) -> list[int]:
        out = list(self.root_joints)
        for inst in self.instances:
            for seq in inst:
                out.extend(seq)
        return out

    def local_depth(self, link: int) -> int:
        """Depth of ``link`` inside its own array (1 = first stage)."""
        if link in self.root_joints:
            return self.root_joints.index(link) + 1
        for inst in self.instances:
            for seq in inst:
                if link in seq:
                    return seq.index(link) + 1
        raise KeyError(link)


def _is_base(model: RobotModel, i: int) -> bool:
    j = model.joint_of(i)
    return model.root_mode is not RootMode.FIXED_BASE or (j is not None and j.dof > 1)


def _chain(model: RobotModel, start: int) -> list[int]:
    seq = [start]
    while len(model.children[seq[-1]]) == 1:
        seq.append(model.children[seq[-1]][0])
    return seq


def _signature(model: RobotModel, seq) -> tuple:
    sig = []
    for i in seq:
        j = model.joint_of(i)
        if j is None:
            sig.append(None)
        else:
            sig.append((j.kind.value, tuple(bool(a) for a in np.abs(j.axis) > 1e-12)))
    return tuple(sig)


def branch_decompose(model: RobotModel, max_multiplex: int = 2) -> BranchLayout:
    """Split the tree into a root array and linear branch arrays.

    The root array is the path from the tree root to the first fan-out.  A tree
    with no fan-out is a single branch, except that a mobile or floating base
    link still forms the root.  Sibling leaf chains with the same joint-type
    sequence and axis sparsity share one array, up to ``max_multiplex`` limbs.
    """
    world_children = model.roots
    root: list[int] = []
    starts: list[tuple[int, int]] = []  # (attach, first link)
    if len(world_children) == 1:
        path = _chain(model, world_children[0])
        tail = model.children[path[-1]]
        if tail:
            root = path
            starts = [(path[-1], c) for c in tail]
        else:
            root = [path[0]] if _is_base(model, path[0]) else []
            if len(path) > len(root):
                starts = [(root[-1] if root else -1, path[len(root)])]
    else:
        starts = [(-1, c) for c in world_children]

    branches, instances, attach = [], [], []
    queue = list(starts)
    while queue:
        level, queue = queue, []
        groups: dict[tuple, list[tuple[int, ...]]] = {}
        order = []
        for at, first in level:
            seq = tuple(_chain(model, first))
            below = model.children[seq[-1]]
            if below:
                key = ("unique", seq)
                queue.extend((seq[-1], c) for c in below)
            else:
                key = (at, _signature(model, seq))
            if key not in groups:
                groups[key] = []
                order.append((key, at))
            groups[key].append(seq)
        for key, at in order:
            members = groups[key]
            for k in range(0, len(members), max_multiplex):
                chunk = members[k:k + max_multiplex]
                branches.append(chunk[0])
                instances.append(list(chunk))
                attach.append(at)
    layout = BranchLayout(
        root_joints=tuple(root),
        branches=branches,
        instances=instances,
        multiplexed={b: len(inst) for b, inst in enumerate(instances)},
        attach=attach,
        depth={i: int(d) for i, d in enumerate(model.depth)},
    )
    return layout


# --------------------------------------------------------------------------
# re-rooting and root splitting

class Reroot(NamedTuple):
    model: RobotModel
    old_depth: int
    new_depth: int


def reroot(model: RobotModel, new_root) -> Reroot:
    """Re-orient the tree so that ``new_root`` (name or id) becomes the root.

    Joints on the old-root to new-root path are reversed.  Each reversed link
    takes as its new frame the joint frame it shares with its old child, so the
    reversed joint keeps the same coordinate with a negated axis.  Joint
    coordinates of the two rootings are not remapped.
    """
    r = model.link_index(new_root) if isinstance(new_root, str) else int(new_root)
    _check(model, r)
    if model.links[r].parent < 0:
        return Reroot(model, model.max_depth, model.max_depth)
    if model.root_mode is RootMode.FIXED_BASE:
        raise ModelError("re-rooting a fixed_base model would drop its anchoring joint")
    path = ancestors(model, r) + [r]
    k = len(path) - 1
    links = list(model.links)
    # frame change (new frame -> old frame) for the reversed links
    to_old: dict[int, SpatialTransform] = {}
    for j in range(k):
        to_old[path[j]] = links[path[j + 1]].xform.inverse()
    new_parent = {path[j]: path[j + 1] for j in range(k)}
    new_parent[r] = -1
    new_links: list[Link] = []
    for i, link in enumerate(links):
        if i in new_parent:
            parent = new_parent[i]
            if parent < 0:
                joint, xform = None, SpatialTransform.identity()
            else:
                j = path.index(i)
                old_joint = links[path[j + 1]].joint
                try:
                    joint = old_joint.reversed()
                except ValueError as exc:
                    raise ModelError(f"link {links[path[j + 1]].name!r}: {exc}") from None
                xform = to_old.get(parent, SpatialTransform.identity())
        else:
            parent, joint = link.parent, link.joint
            xform = link.xform
            if parent in to_old:
                xform = link.xform.compose(to_old[parent])
        inertia = link.inertia
        if i in to_old:
            inertia = inertia_transform(to_old[i], inertia)
        new_links.append(Link(link.name, parent, joint, xform, inertia, link.virtual))
    out = _reindexed(model, new_links)
    return Reroot(out, model.max_depth, out.max_depth)


def _reindexed(model: RobotModel, links: list[Link]) -> RobotModel:
    n = len(links)
    children = [[] for _ in range(n)]
    roots = []
    for i, l in enumerate(links):
        (roots if l.parent < 0 else children[l.parent]).append(i)
    order, stack = [], list(reversed(roots))
    while stack:
        i = stack.pop()
        order.append(i)
        stack.extend(reversed(children[i]))
    remap = {old: new for new, old in enumerate(order)}
    out = [replace(links[old], parent=-1 if links[old].parent < 0 else remap[links[old].parent]) for old in order]
    return _validated(RobotModel(model.name, tuple(out), model.root_mode, model.gravity))


def split_root(model: RobotModel) -> RobotModel:
    """Make the 6-DOF virtual root explicit as a spherical joint on a massless
    virtual link followed by a 3-DOF translation joint on the base link."""
    if model.root_mode is not RootMode.FLOATING_SPLIT:
        raise ModelError("split_root needs a floating_split model with a 6-DOF virtual root")
    (r,) = model.roots
    base = model.links[r]
    virtual = Link(base.name + "__spherical", -1, JointType(JointKind.SPHERICAL), base.xform,
                   SpatialInertia.zero(), virtual=True)
    links = [virtual]
    for i, link in enumerate(model.links):
        if i == r:
            links.append(replace(link, parent=0, joint=JointType(JointKind.TRANSLATION3),
                                 xform=SpatialTransform.identity()))
        else:
            links.append(replace(link, parent=link.parent + 1 if link.parent >= 0 else 0))
    return _validated(RobotModel(model.name, tuple(links), RootMode.FIXED_BASE, model.gravity))
