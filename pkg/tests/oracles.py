"""Reference implementations used only by the tests.

Everything here is written with explicit 6x6 / 3x3 matrices and plain loops,
sharing nothing with the library's spatial routines.  Only the model data is
read from the library (link frames, inertias, joint axes and the order in which
multi-axis joints are split into single axes).
"""
from __future__ import annotations

import numpy as np

from rbdpipe.model import RobotModel


def skew(v):
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def plucker(E, r):
    """6x6 motion transform for rotation ``E`` (parent to child) and offset ``r``."""
    X = np.zeros((6, 6))
    X[:3, :3] = E
    X[3:, 3:] = E
    X[3:, :3] = -E @ skew(r)
    return X


def crm(v):
    out = np.zeros((6, 6))
    out[:3, :3] = skew(v[:3])
    out[3:, 3:] = skew(v[:3])
    out[3:, :3] = skew(v[3:])
    return out


def crf(v):
    return -crm(v).T


def rodrigues(axis, angle):
    """Rotation matrix turning vectors by ``angle`` about unit ``axis``."""
    a = np.asarray(axis, float)
    K = skew(a)
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


def inertia_matrix(I):
    m = float(I.mass)
    h = np.asarray(I.com_moment, float)
    out = np.zeros((6, 6))
    out[:3, :3] = I.rot_inertia
    out[:3, 3:] = skew(h)
    out[3:, :3] = skew(h).T
    out[3:, 3:] = m * np.eye(3)
    return out


def _chain(model: RobotModel):
    """Per link: (parent, tree transform, [(kind, axis, pitch, dof index)], inertia)."""
    out = []
    for i, link in enumerate(model.links):
        joint = model.joint_of(i)
        prims = []
        if joint is not None:
            start = int(model.dof_offset[i])
            for k, p in enumerate(joint.primitives()):
                prims.append((p.kind, np.asarray(p.axis, float), float(p.pitch), start + k))
        Xtree = plucker(np.asarray(link.xform.rotation), np.asarray(link.xform.translation))
        out.append((link.parent, Xtree, prims, inertia_matrix(link.inertia)))
    return out


def _prim_matrix(kind, axis, pitch, q):
    if kind == "P":
        return plucker(np.eye(3), q * axis)
    E = rodrigues(axis, q).T
    return plucker(E, pitch * q * axis if kind == "H" else np.zeros(3))


def _motion_axis(kind, axis, pitch):
    if kind == "R":
        return np.concatenate([axis, np.zeros(3)])
    if kind == "P":
        return np.concatenate([np.zeros(3), axis])
    return np.concatenate([axis, pitch * axis])


def rnea_dense(model: RobotModel, q, qd, qdd, f_ext=None, gravity=True):
    """Inverse dynamics with one frame per single-axis joint and dense matrices."""
    q, qd, qdd = (np.asarray(x, float) for x in (q, qd, qdd))
    g = np.asarray(model.gravity, float) if gravity else np.zeros(3)
    a_world = np.concatenate([np.zeros(3), -g])
    frames = []  # (parent frame index, X_up, S or None, dof, inertia, link)
    link_last = {}
    for i, (p, Xtree, prims, Imat) in enumerate(_chain(model)):
        parent = link_last.get(p, -1)
        if not prims:
            frames.append((parent, Xtree, None, -1, Imat, i))
        for k, (kind, axis, pitch, d) in enumerate(prims):
            X = _prim_matrix(kind, axis, pitch, q[d])
            if k == 0:
                X = X @ Xtree
            last = k == len(prims) - 1
            frames.append((parent, X, _motion_axis(kind, axis, pitch), d, Imat if last else None, i))
            parent = len(frames) - 1
        link_last[i] = len(frames) - 1
    n = len(frames)
    v, a, f = [None] * n, [None] * n, [None] * n
    for k, (p, X, S, d, Imat, link) in enumerate(frames):
        vp = np.zeros(6) if p < 0 else v[p]
        ap = a_world if p < 0 else a[p]
        if S is None:
            v[k], a[k] = X @ vp, X @ ap
        else:
            v[k] = X @ vp + S * qd[d]
            a[k] = X @ ap + S * qdd[d] + crm(v[k]) @ S * qd[d]
        f[k] = np.zeros(6)
        if Imat is not None:
            f[k] = Imat @ a[k] + crf(v[k]) @ Imat @ v[k]
            if f_ext is not None:
                f[k] = f[k] - np.asarray(f_ext, float)[link]
    tau = np.zeros(model.n_dof)
    for k in range(n - 1, -1, -1):
        p, X, S, d, _, _ = frames[k]
        if S is not None:
            tau[d] = S @ f[k]
        if p >= 0:
            f[p] = f[p] + X.T @ f[k]
    return tau


def mass_matrix_unit(model, q):
    """Columns of M from unit accelerations with gravity and velocity removed."""
    n = model.n_dof
    zero = np.zeros(n)
    return np.stack([rnea_dense(model, q, zero, np.eye(n)[j], gravity=False) for j in range(n)], axis=1)


def _link_kinematics(model, q, qd):
    """World pose (R, p) and body velocity of every link frame."""
    q, qd = np.asarray(q, float), np.asarray(qd, float)
    out = []
    for i, (p, Xtree, prims, Imat) in enumerate(_chain(model)):
        link = model.links[i]
        if p < 0:
            R, pos, vel = np.eye(3), np.zeros(3), np.zeros(6)
        else:
            R, pos, vel = out[p][0], out[p][1], out[p][2]
        # tree offset: frame whose axes are E^T in the parent, origin at r
        E, r = np.asarray(link.xform.rotation), np.asarray(link.xform.translation)
        pos = pos + R @ r
        R = R @ E.T
        vel = Xtree @ vel
        for kind, axis, pitch, d in prims:
            Xj = _prim_matrix(kind, axis, pitch, q[d])
            Ej = Xj[:3, :3]
            rj = (q[d] * axis if kind == "P" else pitch * q[d] * axis if kind == "H" else np.zeros(3))
            pos = pos + R @ rj
            R = R @ Ej.T
            vel = Xj @ vel + _motion_axis(kind, axis, pitch) * qd[d]
        out.append((R, pos, vel, Imat))
    return out


def kinetic_energy(model, q, qd):
    return sum(0.5 * vel @ Imat @ vel for (_, _, vel, Imat) in _link_kinematics(model, q, qd))


def potential_energy(model, q):
    g = np.asarray(model.gravity, float)
    V = 0.0
    for i, (R, pos, _, _) in enumerate(_link_kinematics(model, q, np.zeros(model.n_dof))):
        I = model.links[i].inertia
        m = float(I.mass)
        if m > 0:
            com = np.asarray(I.com_moment, float) / m
            V -= m * g @ (pos + R @ com)
    return V


def mass_matrix_energy(model, q):
    """M as the Hessian of kinetic energy in qd: sum of J_i^T I_i J_i, with
    body velocity Jacobian columns J_i e_j from unit joint rates."""
    n = model.n_dof
    per_rate = [_link_kinematics(model, q, np.eye(n)[j]) for j in range(n)]
    M = np.zeros((n, n))
    for i in range(model.n_bodies):
        J = np.stack([per_rate[j][i][2] for j in range(n)], axis=1)
        M += J.T @ per_rate[0][i][3] @ J
    return M


def lagrangian_id(model, q, qd, qdd, h=1e-5):
    """tau = d/dt(dT/dqd) - dT/dq + dV/dq, with the q-derivatives by central differences."""
    q, qd, qdd = (np.asarray(x, float) for x in (q, qd, qdd))
    M = mass_matrix_energy(model, q)
    Mdot = (mass_matrix_energy(model, q + h * qd) - mass_matrix_energy(model, q - h * qd)) / (2 * h)
    n = model.n_dof
    dT = np.zeros(n)
    dV = np.zeros(n)
    for j in range(n):
        e = h * np.eye(n)[j]
        dT[j] = (kinetic_energy(model, q + e, qd) - kinetic_energy(model, q - e, qd)) / (2 * h)
        dV[j] = (potential_energy(model, q + e) - potential_energy(model, q - e)) / (2 * h)
    return M @ qdd + Mdot @ qd - dT + dV


def jacobian_fd(f, x, h=1e-6, batched=True):
    """Central-difference Jacobian, one column per coordinate of ``x``.

    With ``batched`` the function is called once on all perturbed points
    stacked along a leading axis."""
    x = np.asarray(x, float)
    if batched:
        E = h * np.eye(x.size)
        out = np.asarray(f(np.concatenate([x + E, x - E])))
        return np.moveaxis((out[: x.size] - out[x.size:]) / (2 * h), 0, -1)
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h))
    return np.stack(cols, axis=-1)


def rel_max(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))
