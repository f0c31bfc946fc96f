"""The seven dynamics functions built on the shared RNEA / MMinvGen steps."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..model.joints import JointKind
from ..model.robot import RobotModel
from .drnea import DerivativeBlocks, drnea
from .mminv import mminv_gen
from .rnea import DimensionError, check_vector, rnea
from .trig import trig_approx


class FunctionId(str, Enum):
    ID = "ID"
    FD = "FD"
    M = "M"
    MINV = "Minv"
    DID = "dID"
    DFD = "dFD"
    DIFD = "diFD"

    @classmethod
    def parse(cls, name: str) -> "FunctionId":
        for f in cls:
            if f.value.lower() == str(name).lower():
                return f
        raise ValueError(f"unknown function {name!r}; expected one of {', '.join(f.value for f in cls)}")

    @property
    def needs_minv(self) -> bool:
        return self is FunctionId.DIFD


@dataclass
class RobotState:
    """One task's inputs.  ``qdd_or_tau`` is ``tau`` for FD/dFD and ``qdd``
    for ID/dID/diFD; it is ignored by M and Minv."""

    q: np.ndarray
    qd: np.ndarray | None = None
    qdd_or_tau: np.ndarray | None = None
    f_ext: np.ndarray | None = None
    minv: np.ndarray | None = None
    base: tuple | None = None

    def trig(self):
        return trig_approx(np.asarray(self.q, float))


def _zeros_like(x):
    return np.zeros(np.shape(x))


def inverse_dynamics(model, q, qd, qdd, f_ext=None, **kw):
    return rnea(model, q, qd, qdd, f_ext, **kw)[0]


def mass_matrix(model, q, **kw):
    return mminv_gen(model, q, True, False, **kw)[0]


def mass_matrix_inverse(model, q, **kw):
    return mminv_gen(model, q, False, True, **kw)[1]


def _matvec(A, x):
    acc = A[..., :, 0] * x[..., None, 0]
    for j in range(1, A.shape[-1]):
        acc = acc + A[..., :, j] * x[..., None, j]
    return acc


def _matmat(A, B):
    acc = A[..., :, 0, None] * B[..., None, 0, :]
    for j in range(1, A.shape[-1]):
        acc = acc + A[..., :, j, None] * B[..., None, j, :]
    return acc


def fd(model: RobotModel, q, qd, tau, f_ext=None, *, base=None, return_minv: bool = False):
    """Forward dynamics ``qdd = Minv (tau - C)`` with ``C = ID(q, qd, 0, f_ext)``."""
    q = check_vector(model, q, "q")
    qd = check_vector(model, qd, "qd")
    tau = check_vector(model, tau, "tau")
    s, c = trig_approx(q)
    bias, _ = rnea(model, q, qd, np.zeros(np.broadcast_shapes(q.shape, qd.shape)), f_ext, base=base,
                   sinq=s, cosq=c)
    _, Minv = mminv_gen(model, q, False, True, sinq=s, cosq=c)
    qdd = _matvec(Minv, tau - bias)
    return (qdd, Minv) if return_minv else qdd


def _compose(Minv, blocks: DerivativeBlocks) -> DerivativeBlocks:
    return DerivativeBlocks(-_matmat(Minv, blocks.d_dq), -_matmat(Minv, blocks.d_dqd))


def dfd(model: RobotModel, q, qd, tau, f_ext=None, *, base=None, out_minv: bool = False):
    """Forward-dynamics derivatives ``d qdd / d(q, qd) = -Minv dID(q, qd, FD)``.

    Returns ``(blocks, Minv)`` where ``Minv`` is ``None`` unless ``out_minv``.
    """
    qdd, Minv = fd(model, q, qd, tau, f_ext, base=base, return_minv=True)
    blocks = difd(model, q, qd, qdd, Minv, f_ext, base=base)
    return blocks, (Minv if out_minv else None)


def difd(model: RobotModel, q, qd, qdd, Minv, f_ext=None, *, base=None) -> DerivativeBlocks:
    """``dFD`` from a caller-supplied ``qdd`` and ``Minv`` (no forward-dynamics stage)."""
    Minv = np.asarray(Minv, float)
    n = model.n_dof
    if Minv.shape[-2:] != (n, n):
        raise DimensionError(f"Minv must be {n}x{n}, got shape {Minv.shape}")
    blocks = drnea(model, q, qd, qdd, f_ext, base=base)
    return _compose(Minv, blocks)


def evaluate(model: RobotModel, function: FunctionId | str, state: RobotState):
    """Run one function on one state.  Result types per function:

    ID -> tau, FD -> qdd, M -> M, Minv -> Minv,
    dID / dFD / diFD -> :class:`DerivativeBlocks`.
    """
    function = function if isinstance(function, FunctionId) else FunctionId.parse(function)
    q = check_vector(model, state.q, "q")
    if function is FunctionId.M:
        return mass_matrix(model, q)
    if function is FunctionId.MINV:
        return mass_matrix_inverse(model, q)
    qd = check_vector(model, state.qd if state.qd is not None else _zeros_like(q), "qd")
    u = check_vector(model, state.qdd_or_tau if state.qdd_or_tau is not None else _zeros_like(q), "qdd_or_tau")
    kw = {"base": state.base}
    if function is FunctionId.ID:
        return inverse_dynamics(model, q, qd, u, state.f_ext, **kw)
    if function is FunctionId.FD:
        return fd(model, q, qd, u, state.f_ext, **kw)
    if function is FunctionId.DID:
        return drnea(model, q, qd, u, state.f_ext, **kw)
    if function is FunctionId.DFD:
        return dfd(model, q, qd, u, state.f_ext, **kw)[0]
    minv = state.minv if state.minv is not None else mass_matrix_inverse(model, q)
    return difd(model, q, qd, u, minv, state.f_ext, **kw)


def random_states(model: RobotModel, count: int, seed: int = 0, *, function: FunctionId | str = FunctionId.ID,
                  with_fext: bool = False) -> list[RobotState]:
    """Seeded random states.  Euler pitch coordinates of the floating base stay
    within +-1.2 rad, away from the gimbal-lock singularity."""
    function = function if isinstance(function, FunctionId) else FunctionId.parse(function)
    rng = np.random.default_rng(seed)
    n = model.n_dof
    # Euler coordinates are ordered yaw, pitch, roll in both joint kinds.
    pitch = [int(model.dof_offset[i]) + 1 for i, j in enumerate(model.joints)
             if j is not None and j.kind in (JointKind.SPHERICAL, JointKind.FLOATING)]
    out = []
    for _ in range(count):
        q = rng.uniform(-np.pi, np.pi, n)
        q[pitch] = rng.uniform(-1.2, 1.2, len(pitch))
        qd = rng.uniform(-2.0, 2.0, n)
        u = rng.uniform(-5.0, 5.0, n)
        fext = rng.normal(scale=2.0, size=(model.n_bodies, 6)) if with_fext else None
        out.append(RobotState(q, qd, u, fext))
    if function is FunctionId.DIFD:
        for st in out:
            st.qdd_or_tau, st.minv = fd(model, st.q, st.qd, st.qdd_or_tau, st.f_ext, return_minv=True)
    return out
