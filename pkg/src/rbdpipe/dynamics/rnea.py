"""Recursive Newton-Euler inverse dynamics over the primitive tree."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..model.robot import RobotModel, RootMode
from ..spatial import (
    SpatialTransform,
    cross_force,
    cross_motion,
    inertia_apply,
    xform_force_transpose,
    xform_motion,
)
from .trig import trig_approx


class DimensionError(ValueError):
    """An input array does not match the model's dimensions."""


@dataclass
class DynamicsWorkspace:
    """Per-task intermediates kept for reuse by the derivative pass.

    ``v``, ``a`` and ``f`` have shape ``batch + (n, 6)`` and hold the primitive
    frame velocity, acceleration and the fully accumulated force.  ``X`` is only
    filled when transforms are buffered rather than recomputed.
    """

    q: np.ndarray
    qd: np.ndarray
    qdd: np.ndarray
    sinq: np.ndarray
    cosq: np.ndarray
    v: np.ndarray
    a: np.ndarray
    f: np.ndarray
    v_base: np.ndarray
    a_base: np.ndarray
    f_ext: np.ndarray | None = None
    X: list[SpatialTransform] | None = None
    extra: dict = field(default_factory=dict)


def check_vector(model: RobotModel, x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != model.n_dof:
        raise DimensionError(f"{name} must have last dimension {model.n_dof}, got shape {x.shape}")
    return x


def check_fext(model: RobotModel, f_ext, batch) -> np.ndarray | None:
    if f_ext is None:
        return None
    f_ext = np.asarray(f_ext, dtype=float)
    if f_ext.shape[-2:] != (model.n_bodies, 6):
        raise DimensionError(f"f_ext must have trailing shape ({model.n_bodies}, 6), got {f_ext.shape}")
    return np.broadcast_to(f_ext, tuple(batch) + (model.n_bodies, 6))


def base_motion(model: RobotModel, batch, base=None):
    """Base-frame velocity and acceleration seeds.

    ``a`` contains the negated gravity, so gravity enters through the
    accelerations.  ``base`` overrides both for a state-injected root; the
    supplied acceleration is used as given.
    """
    g = np.concatenate([np.zeros(3), -np.asarray(model.gravity, float)])
    v0 = np.zeros(tuple(batch) + (6,))
    a0 = np.broadcast_to(g, tuple(batch) + (6,)).copy()
    if base is not None:
        if model.root_mode is not RootMode.STATE_INJECTED:
            raise DimensionError("base motion can only be supplied for a state_injected root")
        vb, ab = base
        if vb is not None:
            v0 = np.broadcast_to(np.asarray(vb, float), v0.shape).copy()
        if ab is not None:
            a0 = np.broadcast_to(np.asarray(ab, float), a0.shape).copy()
    return v0, a0


def joint_xform(tree, k, q, s, c) -> SpatialTransform:
    """``X_k = XJ(q_k) Xtree_k`` from the cached trig values."""
    return tree.prims[k].transform(q[..., k], s[..., k], c[..., k]).compose(tree.xtree[k])


def s_times(S, hot, x):
    """``S * x`` for a scalar field ``x``."""
    if hot >= 0:
        out = np.zeros(x.shape + (6,))
        out[..., hot] = x
        return out
    return S * x[..., None]


def s_dot(S, hot, f):
    """``S^T f``."""
    if hot >= 0:
        return f[..., hot]
    return (f[..., 0] * S[0] + f[..., 1] * S[1] + f[..., 2] * S[2]
            + f[..., 3] * S[3] + f[..., 4] * S[4] + f[..., 5] * S[5])


def rnea(model: RobotModel, q, qd, qdd, f_ext=None, *, base=None, sinq=None, cosq=None,
         strategy: str = "pipelined"):
    """Inverse dynamics ``tau = ID(q, qd, qdd, f_ext)``.

    The ``"pipelined"`` strategy recomputes each joint transform in the
    backward sweep and defers every child-to-parent force addition until the
    parent is visited.  ``"direct"`` buffers the transforms and accumulates
    immediately.  Both orderings perform the same additions in the same order,
    so they agree bit for bit.

    Returns ``(tau, workspace)``.
    """
    if strategy not in ("pipelined", "direct"):
        raise ValueError(f"unknown strategy {strategy!r}")
    q = check_vector(model, q, "q")
    qd = check_vector(model, qd, "qd")
    qdd = check_vector(model, qdd, "qdd")
    batch = np.broadcast_shapes(q.shape, qd.shape, qdd.shape)[:-1]
    q, qd, qdd = (np.broadcast_to(x, batch + (model.n_dof,)) for x in (q, qd, qdd))
    f_ext = check_fext(model, f_ext, batch)
    if sinq is None or cosq is None:
        sinq, cosq = trig_approx(q)
    tree = model.tree
    n = tree.n
    v0, a0 = base_motion(model, batch, base)
    v = np.empty(batch + (n, 6))
    a = np.empty(batch + (n, 6))
    f = np.empty(batch + (n, 6))
    buffered = [] if strategy == "direct" else None

    for k in range(n):
        prim, p = tree.prims[k], tree.parent[k]
        S, hot = prim.S, prim.hot
        X = joint_xform(tree, k, q, sinq, cosq)
        if buffered is not None:
            buffered.append(X)
        vp, ap = (v0, a0) if p < 0 else (v[..., p, :], a[..., p, :])
        vJ = s_times(S, hot, qd[..., k])
        vk = xform_motion(X, vp) + vJ
        ak = xform_motion(X, ap) + s_times(S, hot, qdd[..., k]) + cross_motion(vk, vJ)
        v[..., k, :] = vk
        a[..., k, :] = ak
        I = tree.inertia[k]
        if I is None:
            f[..., k, :] = 0.0
        else:
            f[..., k, :] = inertia_apply(I, ak) + cross_force(vk, inertia_apply(I, vk))
        if f_ext is not None and k == tree.link_frame[tree.link_of[k]]:
            f[..., k, :] -= f_ext[..., tree.link_of[k], :]

    tau = np.empty(batch + (n,))
    if strategy == "direct":
        for k in range(n - 1, -1, -1):
            prim, p = tree.prims[k], tree.parent[k]
            tau[..., k] = s_dot(prim.S, prim.hot, f[..., k, :])
            if p >= 0:
                f[..., p, :] += xform_force_transpose(buffered[k], f[..., k, :])
    else:
        pending: list[list[np.ndarray]] = [[] for _ in range(n)]
        for k in range(n - 1, -1, -1):
            prim, p = tree.prims[k], tree.parent[k]
            fk = f[..., k, :]
            for addend in pending[k]:
                fk += addend
            pending[k] = []
            tau[..., k] = s_dot(prim.S, prim.hot, fk)
            if p >= 0:
                X = joint_xform(tree, k, q, sinq, cosq)
                pending[p].append(xform_force_transpose(X, fk))

    ws = DynamicsWorkspace(q, qd, qdd, sinq, cosq, v, a, f, v0, a0, f_ext, buffered)
    return tau, ws
