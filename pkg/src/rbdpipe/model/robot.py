"""Kinematic-tree robot model and its JSON document format."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np

from ..spatial import SpatialInertia, SpatialTransform, rpy_matrix
from .joints import JointKind, JointType


class ModelError(ValueError):
    """Invalid model document or model operation."""


class RootMode(str, Enum):
    FLOATING_SPLIT = "floating_split"
    FIXED_BASE = "fixed_base"
    STATE_INJECTED = "state_injected"
    IGNORED = "ignored"


@dataclass(frozen=True)
class Link:
    name: str
    parent: int  # -1 for a link attached to the world / base anchor
    joint: JointType | None
    xform: SpatialTransform
    inertia: SpatialInertia
    virtual: bool = False


@dataclass(frozen=True, eq=False)
class RobotModel:
    name: str
    links: tuple[Link, ...]
    root_mode: RootMode = RootMode.FIXED_BASE
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -9.81]))

    @property
    def n_bodies(self) -> int:
        return len(self.links)

    @cached_property
    def parent(self) -> np.ndarray:
        return np.array([l.parent for l in self.links], dtype=int)

    def link_index(self, name: str) -> int:
        for i, l in enumerate(self.links):
            if l.name == name:
                return i
        raise ModelError(f"no link named {name!r}")

    @cached_property
    def roots(self) -> list[int]:
        return [i for i, l in enumerate(self.links) if l.parent < 0]

    def joint_of(self, i: int) -> JointType | None:
        """Effective joint of link ``i``; the FloatingSplit root gets the 6-DOF virtual joint."""
        link = self.links[i]
        if link.parent < 0 and self.root_mode is not RootMode.FIXED_BASE:
            if self.root_mode is RootMode.FLOATING_SPLIT:
                return JointType(JointKind.FLOATING)
            return None
        return link.joint

    @cached_property
    def joints(self) -> list[JointType | None]:
        return [self.joint_of(i) for i in range(self.n_bodies)]

    @cached_property
    def link_dof(self) -> np.ndarray:
        return np.array([0 if j is None else j.dof for j in self.joints], dtype=int)

    @cached_property
    def dof_offset(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.link_dof)[:-1]]).astype(int)

    @property
    def n_dof(self) -> int:
        return int(self.link_dof.sum())

    def dof_slice(self, i: int) -> slice:
        o = int(self.dof_offset[i])
        return slice(o, o + int(self.link_dof[i]))

    @cached_property
    def children(self) -> list[list[int]]:
        out = [[] for _ in self.links]
        for i, p in enumerate(self.parent):
            if p >= 0:
                out[p].append(i)
        return out

    @cached_property
    def depth(self) -> np.ndarray:
        """Iteration depth of every link; the root link has depth 1."""
        d = np.zeros(self.n_bodies, dtype=int)
        for i, p in enumerate(self.parent):
            d[i] = 1 if p < 0 else d[p] + 1
        return d

    @property
    def max_depth(self) -> int:
        return int(self.depth.max())

    @property
    def total_mass(self) -> float:
        return math.fsum(float(l.inertia.mass) for l in self.links)

    @cached_property
    def tree(self):
        """Single-axis primitive tree used by the dynamics routines."""
        from ..dynamics.tree import PrimitiveTree

        return PrimitiveTree.from_model(self)

    def with_root_mode(self, mode: RootMode | str) -> "RobotModel":
        mode = RootMode(mode)
        links = self.links
        if mode is RootMode.FIXED_BASE and self.root_mode is not RootMode.FIXED_BASE:
            raise ModelError("switching to fixed_base needs an explicit root joint")
        return _validated(replace(self, root_mode=mode, links=links))


# --------------------------------------------------------------------------
# document I/O

_INERTIA_KEYS = ("ixx", "iyy", "izz", "ixy", "ixz", "iyz")


def _parse_xform(doc, name) -> SpatialTransform:
    doc = doc or {}
    xyz = np.asarray(doc.get("xyz", [0.0, 0.0, 0.0]), float)
    if "R" in doc and "rpy" in doc:
        raise ModelError(f"link {name!r}: xform gives both R and rpy")
    if "R" in doc:
        R = np.asarray(doc["R"], float)
        if R.shape != (3, 3) or not np.allclose(R.T @ R, np.eye(3), atol=1e-9):
            raise ModelError(f"link {name!r}: xform.R is not a rotation matrix")
    else:
        R = rpy_matrix(doc.get("rpy", [0.0, 0.0, 0.0]))
    if xyz.shape != (3,):
        raise ModelError(f"link {name!r}: xform.xyz must have 3 entries")
    return SpatialTransform.from_pose(R, xyz)


def _parse_inertia(doc, name, virtual) -> SpatialInertia:
    if doc is None:
        if virtual:
            return SpatialInertia.zero()
        raise ModelError(f"link {name!r}: missing inertia")
    try:
        mass = float(doc["mass"])
    except (KeyError, TypeError, ValueError):
        raise ModelError(f"link {name!r}: inertia.mass missing or not a number") from None
    if not math.isfinite(mass) or (mass <= 0.0 and not virtual) or mass < 0.0:
        raise ModelError(f"link {name!r}: mass must be positive, got {mass}")
    try:
        com = np.asarray(doc.get("com", [0.0, 0.0, 0.0]), float)
        vals = {k: float(doc.get(k, 0.0)) for k in _INERTIA_KEYS}
    except (TypeError, ValueError):
        raise ModelError(f"link {name!r}: inertia entries must be numbers") from None
    if com.shape != (3,) or not np.isfinite(com).all() or not all(map(math.isfinite, vals.values())):
        raise ModelError(f"link {name!r}: inertia.com must be a finite 3-vector and moments finite")
    Ic = np.array([
        [vals["ixx"], vals["ixy"], vals["ixz"]],
        [vals["ixy"], vals["iyy"], vals["iyz"]],
        [vals["ixz"], vals["iyz"], vals["izz"]],
    ])
    return SpatialInertia.from_com(mass, com, Ic)


def _parse_joint(doc, name) -> JointType | None:
    if doc is None:
        return None
    kind = doc.get("kind")
    try:
        kind = JointKind(kind)
    except ValueError:
        raise ModelError(f"link {name!r}: unknown joint kind {kind!r}") from None
    if kind is JointKind.FLOATING:
        raise ModelError(f"link {name!r}: 'floating' is implied by root_mode floating_split")
    try:
        return JointType(kind, np.asarray(doc.get("axis", [0.0, 0.0, 1.0]), float), float(doc.get("pitch", 0.0)))
    except ValueError as exc:
        raise ModelError(f"link {name!r}: {exc}") from None


def model_from_dict(doc: dict) -> RobotModel:
    if not isinstance(doc, dict) or "links" not in doc:
        raise ModelError("model document needs a 'links' list")
    try:
        mode = RootMode(doc.get("root_mode", "fixed_base"))
    except ValueError:
        raise ModelError(f"unknown root_mode {doc.get('root_mode')!r}") from None
    gravity = np.asarray(doc.get("gravity", [0.0, 0.0, -9.81]), float)
    if gravity.shape != (3,):
        raise ModelError("gravity must be a 3-vector")
    raw = doc["links"]
    names = []
    for entry in raw:
        if not isinstance(entry, dict) or "name" not in entry:
            raise ModelError("every link needs a name")
        if entry["name"] in names:
            raise ModelError(f"duplicate link name {entry['name']!r}")
        names.append(entry["name"])
    index = {n: i for i, n in enumerate(names)}
    parents = []
    for entry in raw:
        p = entry.get("parent")
        if p is None:
            parents.append(-1)
        elif p not in index:
            raise ModelError(f"link {entry['name']!r}: unknown parent {p!r}")
        else:
            parents.append(index[p])
    order = _topological_order(names, parents)
    remap = {old: new for new, old in enumerate(order)}
    links = []
    for old in order:
        entry = raw[old]
        name = entry["name"]
        virtual = bool(entry.get("virtual", False))
        links.append(Link(
            name=name,
            parent=-1 if parents[old] < 0 else remap[parents[old]],
            joint=_parse_joint(entry.get("joint"), name),
            xform=_parse_xform(entry.get("xform"), name),
            inertia=_parse_inertia(entry.get("inertia"), name, virtual),
            virtual=virtual,
        ))
    return _validated(RobotModel(str(doc.get("name", "robot")), tuple(links), mode, gravity))


def _topological_order(names, parents) -> list[int]:
    n = len(names)
    for i in range(n):
        seen, j = set(), i
        while j >= 0:
            if j in seen:
                raise ModelError(f"link {names[i]!r}: parent chain forms a cycle")
            seen.add(j)
            j = parents[j]
    if all(p < i for i, p in enumerate(parents)):
        return list(range(n))
    children = [[] for _ in range(n)]
    roots = []
    for i, p in enumerate(parents):
        (roots if p < 0 else children[p]).append(i)
    order, stack = [], list(reversed(roots))
    while stack:
        i = stack.pop()
        order.append(i)
        stack.extend(reversed(children[i]))
    return order


def _validated(model: RobotModel) -> RobotModel:
    roots = [i for i, l in enumerate(model.links) if l.parent < 0]
    if not roots:
        raise ModelError("model has no root link")
    for i, link in enumerate(model.links):
        if link.parent >= i:
            raise ModelError(f"link {link.name!r}: parent index must precede the link")
        I = link.inertia.rot_inertia
        if not np.allclose(I, I.T):
            raise ModelError(f"link {link.name!r}: rotational inertia must be symmetric")
        if link.parent >= 0 and link.joint is None:
            raise ModelError(f"link {link.name!r}: non-root link needs a joint")
    if model.root_mode is RootMode.FIXED_BASE:
        for i in roots:
            if model.links[i].joint is None:
                raise ModelError(f"link {model.links[i].name!r}: fixed_base root needs a joint")
    else:
        if len(roots) != 1:
            raise ModelError(f"root_mode {model.root_mode.value} needs exactly one root link")
        if model.links[roots[0]].joint is not None:
            raise ModelError(f"link {model.links[roots[0]].name!r}: root joint is implied by root_mode "
                             f"{model.root_mode.value}; omit it")
    return model


def load_model(source) -> RobotModel:
    """Load a model from a path, a JSON string, a dict, or a shipped model name."""
    if isinstance(source, dict):
        return model_from_dict(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        path = Path(source)
        if not path.exists():
            from .. import data

            path = data.model_path(str(source))
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: not valid JSON ({exc})") from None
        return model_from_dict(doc)
    try:
        return model_from_dict(json.loads(source))
    except json.JSONDecodeError as exc:
        raise ModelError(f"not valid JSON ({exc})") from None


def model_to_dict(model: RobotModel) -> dict:
    links = []
    for link in model.links:
        I = link.inertia
        m = float(I.mass)
        c = I.com_moment / m if m > 0 else np.zeros(3)
        Ic = I.rot_inertia - m * (np.dot(c, c) * np.eye(3) - np.outer(c, c))
        entry = {
            "name": link.name,
            "parent": None if link.parent < 0 else model.links[link.parent].name,
            "xform": {"R": link.xform.rotation.T.tolist(), "xyz": link.xform.translation.tolist()},
            "inertia": {"mass": m, "com": c.tolist(), "ixx": Ic[0, 0], "iyy": Ic[1, 1], "izz": Ic[2, 2],
                        "ixy": Ic[0, 1], "ixz": Ic[0, 2], "iyz": Ic[1, 2]},
        }
        if link.joint is not None:
            entry["joint"] = {"kind": link.joint.kind.value, "axis": link.joint.axis.tolist()}
            if link.joint.kind is JointKind.HELICAL:
                entry["joint"]["pitch"] = link.joint.pitch
        if link.virtual:
            entry["virtual"] = True
        links.append(entry)
    return {"name": model.name, "gravity": model.gravity.tolist(), "root_mode": model.root_mode.value,
            "links": links}
