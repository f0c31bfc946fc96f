"""Analytic RNEA derivatives with incremental columns.

In the forward sweep node ``k`` only carries derivative columns for its own
ancestors (including itself): ``dv/dq_j`` vanishes for any ``j`` not on the
path to the base.  The column block therefore grows by one per level.  In the
backward sweep node ``k`` collects columns for ``ancestors(k) ∪ tree(k)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model.robot import RobotModel
from ..spatial import cross_force, cross_motion, inertia_apply, xform_force_transpose, xform_motion
from .rnea import DimensionError, DynamicsWorkspace, joint_xform, rnea, s_dot


@dataclass
class DerivativeBlocks:
    """``d_dq`` and ``d_dqd``, each of shape ``batch + (n, n)``."""

    d_dq: np.ndarray
    d_dqd: np.ndarray

    def __iter__(self):
        yield self.d_dq
        yield self.d_dqd


def _with_column(left, col, batch):
    col = np.broadcast_to(col, tuple(batch) + (1, 6)) if col.ndim == 1 else col[..., None, :]
    return col if left is None else np.concatenate([left, col], axis=-2)


def _body_force_derivative(I, v, Iv, dv, da):
    """Columns of ``d(I a + v x* I v)``."""
    return inertia_apply(I, da) + cross_force(dv, Iv[..., None, :]) + cross_force(v[..., None, :], inertia_apply(I, dv))


def drnea(model: RobotModel, q=None, qd=None, qdd=None, f_ext=None, *, workspace: DynamicsWorkspace | None = None,
          base=None) -> DerivativeBlocks:
    """``d tau / d q`` and ``d tau / d qd`` with ``f_ext`` held constant.

    Reuses ``workspace`` from a matching :func:`rnea` call when given;
    otherwise runs RNEA first.
    """
    if workspace is None:
        if q is None or qd is None or qdd is None:
            raise DimensionError("drnea needs either a workspace or (q, qd, qdd)")
        _, workspace = rnea(model, q, qd, qdd, f_ext, base=base)
    else:
        for name, x in (("q", q), ("qd", qd), ("qdd", qdd)):
            if x is not None and not np.array_equal(np.broadcast_to(x, getattr(workspace, name).shape),
                                                    getattr(workspace, name)):
                raise DimensionError(f"workspace was computed for a different {name}")
        if workspace.v.shape[-2] != model.tree.n:
            raise DimensionError("workspace does not match the model")
    ws = workspace
    tree = model.tree
    n = tree.n
    batch = ws.q.shape[:-1]
    qd = ws.qd

    dvq, daq, dvv, dav = [None] * n, [None] * n, [None] * n, [None] * n
    Fq = [None] * n
    Fv = [None] * n
    for k in range(n):
        prim, p = tree.prims[k], tree.parent[k]
        S = prim.S
        X = ws.X[k] if ws.X is not None else joint_xform(tree, k, ws.q, ws.sinq, ws.cosq)
        Xe = X.expand()
        vp, ap = (ws.v_base, ws.a_base) if p < 0 else (ws.v[..., p, :], ws.a[..., p, :])
        Xvp, Xap = xform_motion(X, vp), xform_motion(X, ap)
        vk = ws.v[..., k, :]
        qdk = qd[..., k, None, None]
        # d/dq: dX/dq_k = -S x X, so the parent terms pick up -S x (X v_p) = (X v_p) x S.
        dvq_k = _with_column(None if p < 0 else xform_motion(Xe, dvq[p]), cross_motion(Xvp, S), batch)
        daq_k = _with_column(None if p < 0 else xform_motion(Xe, daq[p]), cross_motion(Xap, S), batch)
        daq_k = daq_k + cross_motion(dvq_k, S) * qdk
        # d/dqd
        dvv_k = _with_column(None if p < 0 else xform_motion(Xe, dvv[p]), S, batch)
        dav_k = _with_column(None if p < 0 else xform_motion(Xe, dav[p]), cross_motion(vk, S), batch)
        dav_k = dav_k + cross_motion(dvv_k, S) * qdk
        dvq[k], daq[k], dvv[k], dav[k] = dvq_k, daq_k, dvv_k, dav_k
        width = len(tree.cols[k])
        Fq[k] = np.zeros(batch + (width, 6))
        Fv[k] = np.zeros(batch + (width, 6))
        I = tree.inertia[k]
        if I is not None:
            Iv = inertia_apply(I, vk)
            pos = _positions(tree, k)[0]
            Fq[k][..., pos, :] = _body_force_derivative(I, vk, Iv, dvq_k, daq_k)
            Fv[k][..., pos, :] = _body_force_derivative(I, vk, Iv, dvv_k, dav_k)

    d_dq = np.zeros(batch + (n, n))
    d_dqd = np.zeros(batch + (n, n))
    pending = [[] for _ in range(n)]
    for k in range(n - 1, -1, -1):
        prim, p = tree.prims[k], tree.parent[k]
        fq, fv = Fq[k], Fv[k]
        for pos, cq, cv in pending[k]:
            fq[..., pos, :] += cq
            fv[..., pos, :] += cv
        pending[k] = []
        cols = tree.cols[k]
        d_dq[..., k, cols] = s_dot(prim.S, prim.hot, fq)
        d_dqd[..., k, cols] = s_dot(prim.S, prim.hot, fv)
        if p >= 0:
            X = joint_xform(tree, k, ws.q, ws.sinq, ws.cosq)
            Xe = X.expand()
            cq = xform_force_transpose(Xe, fq)
            own = _positions(tree, k)[2]
            # dX^T/dq_k f = X^T (S x* f)
            cq[..., own, :] += xform_force_transpose(X, cross_force(prim.S, ws.f[..., k, :]))
            pending[p].append((_positions(tree, k)[1], cq, xform_force_transpose(Xe, fv)))
    return DerivativeBlocks(d_dq, d_dqd)


_POS_CACHE: dict = {}


def _positions(tree, k):
    """Index maps for node ``k``: its ancestors inside ``cols[k]``, ``cols[k]``
    inside ``cols[parent]``, and ``k`` itself inside ``cols[k]``."""
    key = (id(tree), k)
    hit = _POS_CACHE.get(key)
    if hit is None or hit[0] is not tree:
        cols = tree.cols[k]
        where = {c: i for i, c in enumerate(cols)}
        anc = np.array([where[j] for j in tree.anc[k]], dtype=int)
        p = tree.parent[k]
        if p >= 0:
            pwhere = {c: i for i, c in enumerate(tree.cols[p])}
            up = np.array([pwhere[c] for c in cols], dtype=int)
        else:
            up = np.zeros(0, dtype=int)
        hit = (tree, anc, up, where[k])
        _POS_CACHE[key] = hit
    return hit[1:]
