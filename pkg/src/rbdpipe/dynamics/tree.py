"""Flattened single-axis primitive tree derived from a :class:`RobotModel`."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model.joints import Primitive
from ..model.robot import RobotModel, RootMode
from ..spatial import SpatialInertia, SpatialTransform


@dataclass(frozen=True, eq=False)
class PrimitiveTree:
    """One node per degree of freedom.

    ``parent[k]`` is -1 when node ``k`` hangs directly off the base frame.  The
    first primitive of a link carries the link's tree transform; the last one
    is the link frame and carries its inertia.  ``link_frame[i]`` gives that
    node for link ``i`` (-1 for a zero-DOF base link).
    """

    n: int
    parent: list[int]
    prims: list[Primitive]
    xtree: list[SpatialTransform]
    inertia: list[SpatialInertia | None]
    link_of: list[int]
    link_frame: list[int]
    anc: list[list[int]]
    desc: list[list[int]]
    cols: list[list[int]]
    base_is_link: bool
    base_link: int

    @classmethod
    def from_model(cls, model: RobotModel) -> "PrimitiveTree":
        parent, prims, xtree, inertia, link_of = [], [], [], [], []
        link_frame = []
        base_is_link = model.root_mode in (RootMode.STATE_INJECTED, RootMode.IGNORED)
        base_link = model.roots[0] if base_is_link else -1
        for i, link in enumerate(model.links):
            joint = model.joint_of(i)
            if joint is None:
                link_frame.append(-1)
                continue
            up = -1 if link.parent < 0 else link_frame[link.parent]
            ps = joint.primitives()
            for j, prim in enumerate(ps):
                parent.append(up)
                prims.append(prim)
                xtree.append(link.xform if j == 0 else SpatialTransform.identity())
                last = j == len(ps) - 1
                inertia.append(link.inertia if last and float(link.inertia.mass) > 0.0 else None)
                link_of.append(i)
                up = len(prims) - 1
            link_frame.append(up)
        n = len(prims)
        anc = []
        for k in range(n):
            p = parent[k]
            anc.append((anc[p] if p >= 0 else []) + [k])
        desc = [[k] for k in range(n)]
        for k in range(n - 1, -1, -1):
            if parent[k] >= 0:
                desc[parent[k]].extend(desc[k])
        desc = [sorted(d) for d in desc]
        cols = [sorted(set(a) | set(d)) for a, d in zip(anc, desc)]
        return cls(n, parent, prims, xtree, inertia, link_of, link_frame, anc, desc, cols,
                   base_is_link, base_link)

    def S(self, k: int) -> np.ndarray:
        return self.prims[k].S
