"""Spatial (6-D) vector algebra.

Spatial vectors are plain float arrays whose last axis has length 6, ordered
angular-then-linear.  Every function broadcasts over leading axes, so a batch
of states, or a block of derivative columns, goes through the same code as a
single vector.

Transforms follow Featherstone's Pluecker convention,
``X = [E 0; -E rx E]``, where ``E`` rotates parent coordinates into child
coordinates and ``r`` is the child origin expressed in the parent frame.  The
6x6 matrix is never formed here; ``dense()`` helpers exist for test oracles.

All products are written out element by element (no BLAS calls) so that a
result does not depend on how many other items share the batch.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _cross3(a, b):
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


def _mv3(E, x):
    """E @ x for stacked 3x3 matrices and 3-vectors."""
    return E[..., :, 0] * x[..., None, 0] + E[..., :, 1] * x[..., None, 1] + E[..., :, 2] * x[..., None, 2]


def _mtv3(E, x):
    """E.T @ x."""
    return E[..., 0, :] * x[..., 0, None] + E[..., 1, :] * x[..., 1, None] + E[..., 2, :] * x[..., 2, None]


def _mm3(A, B):
    return (A[..., :, 0, None] * B[..., None, 0, :]
            + A[..., :, 1, None] * B[..., None, 1, :]
            + A[..., :, 2, None] * B[..., None, 2, :])


def _tr3(A):
    return np.swapaxes(A, -1, -2)


def skew(x):
    """Matrix ``x×`` with ``skew(x) @ y == cross(x, y)``."""
    x = np.asarray(x, dtype=float)
    z = np.zeros_like(x[..., 0])
    return np.stack([
        np.stack([z, -x[..., 2], x[..., 1]], axis=-1),
        np.stack([x[..., 2], z, -x[..., 0]], axis=-1),
        np.stack([-x[..., 1], x[..., 0], z], axis=-1),
    ], axis=-2)


def spatial(angular, linear):
    return np.concatenate([np.asarray(angular, float), np.asarray(linear, float)], axis=-1)


def cross_motion(v, m):
    """Motion cross product ``v × m``."""
    w, vl = v[..., :3], v[..., 3:]
    return np.concatenate([_cross3(w, m[..., :3]), _cross3(w, m[..., 3:]) + _cross3(vl, m[..., :3])], axis=-1)


def cross_force(v, f):
    """Force cross product ``v ×* f`` (the negative transpose of ``v×``)."""
    w, vl = v[..., :3], v[..., 3:]
    return np.concatenate([_cross3(w, f[..., :3]) + _cross3(vl, f[..., 3:]), _cross3(w, f[..., 3:])], axis=-1)


def dot(a, b):
    return (a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]
            + a[..., 3] * b[..., 3] + a[..., 4] * b[..., 4] + a[..., 5] * b[..., 5])


@dataclass(frozen=True)
class SpatialTransform:
    """Pluecker transform stored as ``(E, r)``; arrays may carry batch axes."""

    rotation: np.ndarray
    translation: np.ndarray

    @classmethod
    def identity(cls, batch=()):
        E = np.broadcast_to(np.eye(3), tuple(batch) + (3, 3)).copy()
        return cls(E, np.zeros(tuple(batch) + (3,)))

    @classmethod
    def from_pose(cls, R, p):
        """Transform into a frame whose axes are the columns of ``R`` and whose
        origin sits at ``p``, both given in the parent frame."""
        R = np.asarray(R, float)
        return cls(_tr3(R).copy(), np.asarray(p, float).copy())

    def compose(self, inner: "SpatialTransform") -> "SpatialTransform":
        """``self ∘ inner``: apply ``inner`` first."""
        return SpatialTransform(_mm3(self.rotation, inner.rotation),
                                inner.translation + _mtv3(inner.rotation, self.translation))

    def inverse(self) -> "SpatialTransform":
        return SpatialTransform(_tr3(self.rotation).copy(), -_mv3(self.rotation, self.translation))

    def expand(self) -> "SpatialTransform":
        """Insert a broadcast axis before the vector axis (for column blocks)."""
        return SpatialTransform(self.rotation[..., None, :, :], self.translation[..., None, :])

    def dense(self):
        E, r = self.rotation, self.translation
        out = np.zeros(E.shape[:-2] + (6, 6))
        out[..., :3, :3] = E
        out[..., 3:, 3:] = E
        out[..., 3:, :3] = -_mm3(E, skew(r))
        return out


def xform_motion(X: SpatialTransform, v):
    w = v[..., :3]
    return np.concatenate([_mv3(X.rotation, w), _mv3(X.rotation, v[..., 3:] - _cross3(X.translation, w))], axis=-1)


def xform_force_transpose(X: SpatialTransform, f):
    """``X^T f``: carries a child-frame force into the parent frame."""
    n = _mtv3(X.rotation, f[..., :3])
    fl = _mtv3(X.rotation, f[..., 3:])
    return np.concatenate([n + _cross3(X.translation, fl), fl], axis=-1)


@dataclass(frozen=True)
class SpatialInertia:
    """Rigid-body inertia: mass, first moment ``h = m c``, and the rotational
    inertia about the frame origin."""

    mass: np.ndarray
    com_moment: np.ndarray
    rot_inertia: np.ndarray

    @classmethod
    def from_com(cls, mass, com, inertia_com):
        """Build from mass, centre of mass and the inertia tensor about the COM."""
        m = float(mass)
        c = np.asarray(com, float)
        Ic = np.asarray(inertia_com, float)
        Ibar = Ic + m * (np.dot(c, c) * np.eye(3) - np.outer(c, c))
        return cls(np.asarray(m), m * c, Ibar)

    @classmethod
    def zero(cls):
        return cls(np.asarray(0.0), np.zeros(3), np.zeros((3, 3)))

    def dense(self):
        m = np.asarray(self.mass, float)
        out = np.zeros(m.shape + (6, 6))
        hx = skew(self.com_moment)
        out[..., :3, :3] = self.rot_inertia
        out[..., :3, 3:] = hx
        out[..., 3:, :3] = _tr3(hx)
        out[..., 3:, 3:] = m[..., None, None] * np.eye(3)
        return out


def inertia_apply(I: SpatialInertia, v):
    w, vl = v[..., :3], v[..., 3:]
    h = I.com_moment
    return np.concatenate([_mv3(I.rot_inertia, w) + _cross3(h, vl),
                           I.mass[..., None] * vl - _cross3(h, w)], axis=-1)


def inertia_transform(X: SpatialTransform, I: SpatialInertia) -> SpatialInertia:
    """``X^T I X``: re-express a child-frame inertia in the parent frame."""
    E, r = X.rotation, X.translation
    m = np.asarray(I.mass, float)
    h = _mtv3(E, I.com_moment)
    Ibar = _mm3(_tr3(E), _mm3(I.rot_inertia, E))
    hx, rx = skew(h), skew(r)
    Ibar = Ibar - _mm3(hx, rx) - _mm3(rx, hx) - m[..., None, None] * _mm3(rx, rx)
    return SpatialInertia(m, h + m[..., None] * r, Ibar)


# Generic symmetric 6x6 operators (articulated / composite inertias).

def sym6_apply(A, v):
    return (A[..., :, 0] * v[..., None, 0] + A[..., :, 1] * v[..., None, 1] + A[..., :, 2] * v[..., None, 2]
            + A[..., :, 3] * v[..., None, 3] + A[..., :, 4] * v[..., None, 4] + A[..., :, 5] * v[..., None, 5])


def sym6_congruence(X: SpatialTransform, A):
    """``X^T A X`` for a general 6x6 ``A`` using the block structure of ``X``."""
    E, rx = X.rotation, skew(X.translation)
    Et = _tr3(E)
    A11 = _mm3(Et, _mm3(A[..., :3, :3], E))
    A12 = _mm3(Et, _mm3(A[..., :3, 3:], E))
    A21 = _mm3(Et, _mm3(A[..., 3:, :3], E))
    A22 = _mm3(Et, _mm3(A[..., 3:, 3:], E))
    B21 = A21 - _mm3(A22, rx)
    out = np.empty(A.shape)
    out[..., :3, :3] = A11 - _mm3(A12, rx) + _mm3(rx, B21)
    out[..., :3, 3:] = A12 + _mm3(rx, A22)
    out[..., 3:, :3] = B21
    out[..., 3:, 3:] = A22
    return out


def sym6_congruence_column(X: SpatialTransform, A, p: int):
    """Column ``p`` of ``X^T A X`` alone, computed as ``X^T (A (X e_p))``."""
    e = np.zeros(6)
    e[p] = 1.0
    Xe = xform_motion(X, np.broadcast_to(e, X.translation.shape[:-1] + (6,)))
    return xform_force_transpose(X, sym6_apply(A, Xe))


def rotation_about(axis, s, c):
    """Rotation matrix by angle (sin ``s``, cos ``c``) about unit ``axis``."""
    a = np.asarray(axis, float)
    s = np.asarray(s, float)[..., None, None]
    c = np.asarray(c, float)[..., None, None]
    return c * np.eye(3) + s * skew(a) + (1.0 - c) * np.outer(a, a)


def rpy_matrix(rpy):
    """Fixed-axis roll-pitch-yaw: ``Rz(yaw) Ry(pitch) Rx(roll)``."""
    r, p, y = rpy
    cr, sr, cp, sp, cy, sy = np.cos(r), np.sin(r), np.cos(p), np.sin(p), np.cos(y), np.sin(y)
    Rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
    Ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
    Rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
    return Rz @ Ry @ Rx
