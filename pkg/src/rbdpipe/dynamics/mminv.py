"""Joint-space inertia matrix and its inverse from one shared backward sweep.

The mass matrix comes from composite inertias (CRBA, column form); the inverse
from the articulated-body factorisation ``U = I^A S``, ``D = S^T U`` followed
by a forward substitution.  Both read the same recomputed joint transforms.

Every node is a single-axis primitive, so ``D`` is a scalar and ``Dinv`` is a
floating-point reciprocal.
"""
from __future__ import annotations

import numpy as np

from ..model.robot import RobotModel
from ..spatial import sym6_apply, sym6_congruence, sym6_congruence_column, xform_force_transpose, xform_motion
from .rnea import check_vector, joint_xform, s_dot
from .trig import trig_approx


def _sym6_transform(X, A, hot: int, priority: bool):
    """``X^T A X``; with ``priority`` the parent's ``S`` column comes first.

    The column ``U_parent`` depends on is evaluated from its own recurrence;
    the other entries of the upper triangle follow from the block formula and
    the matrix is then symmetrised around the priority column.
    """
    out = sym6_congruence(X, A)
    if priority and hot >= 0:
        col = sym6_congruence_column(X, A, hot)
        out[..., :, hot] = col
        out[..., hot, :] = col
    return out


def _dense_inertia(I, batch):
    if I is None:
        return np.zeros(tuple(batch) + (6, 6))
    return np.broadcast_to(I.dense(), tuple(batch) + (6, 6)).copy()


def mminv_gen(model: RobotModel, q, out_M: bool = True, out_Minv: bool = False, *, sinq=None, cosq=None,
              priority: bool = True):
    """Return ``(M, Minv)``; an output that was not requested is ``None``.

    Only the upper triangle ``[i, i:]`` is computed; entries coupling two joints
    on separate subtrees are left as exact zeros in ``M``.  The returned
    matrices are symmetrised.
    """
    if not (out_M or out_Minv):
        raise ValueError("mminv_gen needs out_M or out_Minv")
    q = check_vector(model, q, "q")
    if sinq is None or cosq is None:
        sinq, cosq = trig_approx(q)
    tree = model.tree
    n = tree.n
    batch = q.shape[:-1]
    M = np.zeros(batch + (n, n)) if out_M else None
    Minv = np.zeros(batch + (n, n)) if out_Minv else None

    # Composite inertia (for M) and articulated inertia (for Minv) are kept in
    # separate accumulators; they coincide only at the leaves.
    pend_IC = [[] for _ in range(n)]
    pend_IA = [[] for _ in range(n)]
    pend_FM = [[] for _ in range(n)]
    pend_FA = [[] for _ in range(n)]
    U = [None] * n
    Dinv = [None] * n
    Xs = [None] * n

    for k in range(n - 1, -1, -1):
        prim, p = tree.prims[k], tree.parent[k]
        S, hot = prim.S, prim.hot
        tk = tree.desc[k]
        width = len(tk)
        X = joint_xform(tree, k, q, sinq, cosq)
        Xs[k] = X
        parent_hot = tree.prims[p].hot if p >= 0 else -1
        up = _up_positions(tree, k)
        if out_M:
            Ic = _dense_inertia(tree.inertia[k], batch)
            for addend in pend_IC[k]:
                Ic += addend
            F = np.zeros(batch + (width, 6))  # columns tree(k)
            for cols, addend in pend_FM[k]:
                F[..., cols, :] += addend
            Uc = sym6_apply(Ic, np.broadcast_to(S, batch + (6,)))
            F[..., 0, :] = Uc
            M[..., k, tk] = s_dot(S, hot, F)
            if p >= 0:
                pend_IC[p].append(_sym6_transform(X, Ic, parent_hot, priority))
                pend_FM[p].append((up, xform_force_transpose(X.expand(), F)))
        if out_Minv:
            Ia = _dense_inertia(tree.inertia[k], batch)
            for addend in pend_IA[k]:
                Ia += addend
            F = np.zeros(batch + (width, 6))
            for cols, addend in pend_FA[k]:
                F[..., cols, :] += addend
            Uk = sym6_apply(Ia, np.broadcast_to(S, batch + (6,)))
            dinv = 1.0 / s_dot(S, hot, Uk)
            Minv[..., k, k] = dinv
            if width > 1:
                Minv[..., k, tk[1:]] = -dinv[..., None] * s_dot(S, hot, F[..., 1:, :])
            U[k], Dinv[k] = Uk, dinv
            if p >= 0:
                F = F + Uk[..., None, :] * Minv[..., k, tk][..., :, None]
                Ia = Ia - (Uk[..., :, None] * dinv[..., None, None]) * Uk[..., None, :]
                pend_IA[p].append(_sym6_transform(X, Ia, parent_hot, priority))
                pend_FA[p].append((up, xform_force_transpose(X.expand(), F)))
        pend_IC[k] = pend_IA[k] = pend_FM[k] = pend_FA[k] = []

    if out_Minv:
        # Forward substitution: P_k holds S-weighted accelerations for columns k:.
        P = [None] * n
        for k in range(n):
            prim, p = tree.prims[k], tree.parent[k]
            S, hot = prim.S, prim.hot
            if p >= 0:
                XP = xform_motion(Xs[k].expand(), P[p][..., k - p:, :])
                Minv[..., k, k:] -= Dinv[k][..., None] * _dot_cols(U[k], XP)
                P[k] = S * Minv[..., k, k:, None] + XP
            else:
                P[k] = S * Minv[..., k, k:, None]
        Minv = _symmetrize(Minv)
    if out_M:
        M = _symmetrize(M)
    return M, Minv


def _dot_cols(u, cols):
    return (u[..., None, 0] * cols[..., 0] + u[..., None, 1] * cols[..., 1] + u[..., None, 2] * cols[..., 2]
            + u[..., None, 3] * cols[..., 3] + u[..., None, 4] * cols[..., 4] + u[..., None, 5] * cols[..., 5])


def _symmetrize(A):
    """Mirror the computed upper triangle into the lower one."""
    upper = np.triu(A)
    return upper + np.swapaxes(np.triu(A, 1), -1, -2)


def _up_positions(tree, k):
    p = tree.parent[k]
    if p < 0:
        return None
    where = {c: i for i, c in enumerate(tree.desc[p])}
    return np.array([where[c] for c in tree.desc[k]], dtype=int)
