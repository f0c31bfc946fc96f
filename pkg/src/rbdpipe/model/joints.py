"""Joint kinds and their decomposition into single-axis primitives.

Every multi-DOF joint is handled as a short chain of single-axis primitives
(revolute, prismatic or helical) joined by massless, zero-offset frames.  This
makes the motion subspace of each primitive a constant 6-vector, so the
recursive algorithms never need ``dS/dq`` terms.  The Euler-angle and planar
parameterisations below are exactly what those chains produce.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..spatial import SpatialTransform, rotation_about


class JointKind(str, Enum):
    REVOLUTE = "revolute"
    PRISMATIC = "prismatic"
    HELICAL = "helical"
    CYLINDRICAL = "cylindrical"
    PLANAR = "planar"
    SPHERICAL = "spherical"
    TRANSLATION3 = "translation3"
    # 6-DOF virtual root; only created implicitly for a FloatingSplit root.
    FLOATING = "floating"


DOF = {
    JointKind.REVOLUTE: 1,
    JointKind.PRISMATIC: 1,
    JointKind.HELICAL: 1,
    JointKind.CYLINDRICAL: 2,
    JointKind.PLANAR: 3,
    JointKind.SPHERICAL: 3,
    JointKind.TRANSLATION3: 3,
    JointKind.FLOATING: 6,
}

_EX, _EY, _EZ = np.eye(3)


@dataclass(frozen=True)
class Primitive:
    """Single-axis joint: 'R' (revolute), 'P' (prismatic) or 'H' (helical)."""

    kind: str
    axis: np.ndarray
    pitch: float = 0.0

    @property
    def S(self) -> np.ndarray:
        if self.kind == "R":
            return np.concatenate([self.axis, np.zeros(3)])
        if self.kind == "P":
            return np.concatenate([np.zeros(3), self.axis])
        return np.concatenate([self.axis, self.pitch * self.axis])

    @property
    def hot(self) -> int:
        """Index of the single nonzero of ``S``, or -1 when ``S`` is not one-hot."""
        S = self.S
        nz = np.flatnonzero(S)
        if len(nz) == 1 and S[nz[0]] == 1.0:
            return int(nz[0])
        return -1

    @property
    def uses_trig(self) -> bool:
        return self.kind in ("R", "H")

    def transform(self, q, s=None, c=None) -> SpatialTransform:
        """Joint transform ``XJ(q)`` (batched over ``q``)."""
        q = np.asarray(q, float)
        if self.kind == "P":
            E = np.broadcast_to(np.eye(3), q.shape + (3, 3)).copy()
            return SpatialTransform(E, q[..., None] * self.axis)
        if s is None:
            s, c = np.sin(q), np.cos(q)
        E = _rotation_T(self.axis, s, c)
        if self.kind == "R":
            return SpatialTransform(E, np.zeros(q.shape + (3,)))
        return SpatialTransform(E, (self.pitch * q)[..., None] * self.axis)


def _rotation_T(axis, s, c):
    s = np.asarray(s, float)
    c = np.asarray(c, float)
    z, o = np.zeros_like(s), np.ones_like(s)
    # Axis-aligned cases written out so that the constant entries stay exact.
    if axis[0] == 1.0 and axis[1] == 0.0 and axis[2] == 0.0:
        rows = [[o, z, z], [z, c, s], [z, -s, c]]
    elif axis[1] == 1.0 and axis[0] == 0.0 and axis[2] == 0.0:
        rows = [[c, z, -s], [z, o, z], [s, z, c]]
    elif axis[2] == 1.0 and axis[0] == 0.0 and axis[1] == 0.0:
        rows = [[c, s, z], [-s, c, z], [z, z, o]]
    else:
        return np.swapaxes(rotation_about(axis, s, c), -1, -2)
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


@dataclass(frozen=True)
class JointType:
    kind: JointKind
    axis: np.ndarray = field(default_factory=lambda: _EZ.copy())
    pitch: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.axis, float)
        n = np.linalg.norm(a)
        if n == 0.0:
            raise ValueError("joint axis must be nonzero")
        object.__setattr__(self, "axis", a / n)
        object.__setattr__(self, "kind", JointKind(self.kind))

    @property
    def dof(self) -> int:
        return DOF[self.kind]

    def primitives(self) -> list[Primitive]:
        k, a = self.kind, self.axis
        if k is JointKind.REVOLUTE:
            return [Primitive("R", a)]
        if k is JointKind.PRISMATIC:
            return [Primitive("P", a)]
        if k is JointKind.HELICAL:
            return [Primitive("H", a, float(self.pitch))]
        if k is JointKind.CYLINDRICAL:
            return [Primitive("R", a), Primitive("P", a)]
        if k is JointKind.PLANAR:
            # q = (x, y, yaw) in the joint frame: translate, then rotate about z.
            return [Primitive("P", _EX), Primitive("P", _EY), Primitive("R", _EZ)]
        if k is JointKind.SPHERICAL:
            # ZYX Euler angles (yaw, pitch, roll); singular at pitch = ±pi/2.
            return [Primitive("R", _EZ), Primitive("R", _EY), Primitive("R", _EX)]
        if k is JointKind.TRANSLATION3:
            return [Primitive("P", _EX), Primitive("P", _EY), Primitive("P", _EZ)]
        if k is JointKind.FLOATING:
            return JointType(JointKind.SPHERICAL).primitives() + JointType(JointKind.TRANSLATION3).primitives()
        raise ValueError(f"unknown joint kind {k}")

    @property
    def one_hot(self) -> bool:
        return self.kind in (JointKind.REVOLUTE, JointKind.PRISMATIC) and all(p.hot >= 0 for p in self.primitives())

    def reversed(self) -> "JointType":
        """Joint seen from the child side, keeping the same coordinate value."""
        if self.kind not in (JointKind.REVOLUTE, JointKind.PRISMATIC, JointKind.HELICAL, JointKind.CYLINDRICAL):
            raise ValueError(f"cannot reverse a {self.kind.value} joint")
        return JointType(self.kind, -self.axis, self.pitch)


@dataclass(frozen=True)
class MotionSubspace:
    columns: np.ndarray

    @property
    def dof(self) -> int:
        return self.columns.shape[1]


def joint_transform(joint: JointType, q) -> SpatialTransform:
    """Composite joint transform for the joint's coordinates ``q`` (length dof)."""
    X = SpatialTransform.identity()
    for prim, qi in zip(joint.primitives(), np.atleast_1d(np.asarray(q, float))):
        X = prim.transform(qi).compose(X)
    return X


def motion_subspace(joint: JointType, q) -> MotionSubspace:
    """Motion subspace in the joint's child frame at configuration ``q``.

    Constant for single-axis joints; configuration dependent for the Euler and
    planar parameterisations.
    """
    from ..spatial import xform_motion

    prims = joint.primitives()
    q = np.atleast_1d(np.asarray(q, float))
    cols = []
    for i, prim in enumerate(prims):
        # Carry primitive i's axis through the remaining primitives' transforms.
        col = prim.S
        for later, ql in zip(prims[i + 1:], q[i + 1:]):
            col = xform_motion(later.transform(ql), col)
        cols.append(col)
    return MotionSubspace(np.stack(cols, axis=1))
