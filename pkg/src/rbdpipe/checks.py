"""Seeded invariant checks for a model, as run by ``rbdpipe check``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import (
    FunctionId,
    difd,
    drnea,
    fd,
    inverse_dynamics,
    mminv_gen,
    random_states,
)
from .model import RobotModel, sparsity_pattern


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = f"{status}  {self.name:<22} {self.value:.3e} (tol {self.tolerance:.0e})"
        return msg + (f"  {self.detail}" if self.detail else "")


def rel_err(a, b) -> float:
    """Max-norm error of ``a`` relative to ``b`` (absolute below unit scale)."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1.0))


def central_difference(f: Callable, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Columns ``d f / d x_j`` by central differences.  ``f`` is called once,
    on a stacked batch of all ``2 n`` perturbed points."""
    x = np.asarray(x, float)
    E = h * np.eye(x.size)
    out = np.asarray(f(np.concatenate([x + E, x - E])))
    n = x.size
    return ((out[:n] - out[n:]) / (2 * h)).T


def _states(model, count, seed, function=FunctionId.ID):
    return random_states(model, count, seed, function=function, with_fext=True)


def check_positive_definite(model, count, seed):
    worst, bad = np.inf, None
    for i, st in enumerate(_states(model, count, seed)):
        M = mminv_gen(model, st.q)[0]
        eig = np.linalg.eigvalsh(0.5 * (M + M.T))
        if eig[0] < worst:
            worst, bad = float(eig[0]), i
    ok = worst > 0
    detail = "" if ok else f"mass matrix is not positive definite (min eigenvalue {worst:.3e} at state {bad}); " \
                           f"check the link inertias"
    return CheckResult("mass-matrix-pd", ok, worst, 0.0, detail)


def check_inverse(model, count, seed):
    n = model.n_dof
    err = 0.0
    for st in _states(model, count, seed):
        M, Minv = mminv_gen(model, st.q, True, True)
        err = max(err, float(np.max(np.abs(M @ Minv - np.eye(n)))))
    return CheckResult("m-minv-identity", err <= 1e-9, err, 1e-9)


def check_unit_acceleration(model, count, seed):
    n = model.n_dof
    err = 0.0
    for st in _states(model, count, seed):
        M = mminv_gen(model, st.q)[0]
        zero = np.zeros(n)
        cols = inverse_dynamics(model, np.broadcast_to(st.q, (n, n)), np.zeros((n, n)), np.eye(n))
        bias = inverse_dynamics(model, st.q, zero, zero)
        err = max(err, rel_err(M, (cols - bias).T))
    return CheckResult("m-unit-acceleration", err <= 1e-10, err, 1e-10)


def check_linearity(model, count, seed):
    err = 0.0
    for st in _states(model, count, seed):
        M = mminv_gen(model, st.q)[0]
        full = inverse_dynamics(model, st.q, st.qd, st.qdd_or_tau, st.f_ext)
        bias = inverse_dynamics(model, st.q, st.qd, np.zeros_like(st.q), st.f_ext)
        err = max(err, rel_err(full - bias, M @ st.qdd_or_tau))
    return CheckResult("eom-linearity", err <= 1e-9, err, 1e-9)


def check_roundtrip(model, count, seed):
    err = 0.0
    for st in _states(model, count, seed):
        qdd = fd(model, st.q, st.qd, st.qdd_or_tau, st.f_ext)
        tau = inverse_dynamics(model, st.q, st.qd, qdd, st.f_ext)
        err = max(err, rel_err(tau, st.qdd_or_tau))
    return CheckResult("id-fd-roundtrip", err <= 1e-8, err, 1e-8)


def check_derivatives(model, count, seed):
    err = 0.0
    for st in _states(model, count, seed):
        q, qd, u, fx = st.q, st.qd, st.qdd_or_tau, st.f_ext
        did = drnea(model, q, qd, u, fx)
        err = max(err, rel_err(did.d_dq, central_difference(lambda x: inverse_dynamics(model, x, qd, u, fx), q)))
        err = max(err, rel_err(did.d_dqd, central_difference(lambda x: inverse_dynamics(model, q, x, u, fx), qd)))
        qdd, Minv = fd(model, q, qd, u, fx, return_minv=True)
        fdq = central_difference(lambda x: fd(model, x, qd, u, fx), q)
        fdv = central_difference(lambda x: fd(model, q, x, u, fx), qd)
        d = difd(model, q, qd, qdd, Minv, fx)
        err = max(err, rel_err(d.d_dq, fdq), rel_err(d.d_dqd, fdv))
    return CheckResult("derivatives-vs-fd", err <= 1e-5, err, 1e-5)


def _outside(mask, A):
    return int(np.count_nonzero(np.asarray(A)[..., ~mask]))


def check_sparsity(model, count, seed):
    mask = sparsity_pattern(model)
    nz = 0
    for st in _states(model, count, seed):
        M = mminv_gen(model, st.q)[0]
        d = drnea(model, st.q, st.qd, st.qdd_or_tau, st.f_ext)
        nz += _outside(mask, M) + _outside(mask, d.d_dq) + _outside(mask, d.d_dqd)
    return CheckResult("m-did-sparsity", nz == 0, float(nz), 0.0,
                       "" if nz == 0 else f"{nz} nonzeros outside the branch pattern")


def check_minv_sparsity(model, count, seed):
    mask = sparsity_pattern(model)
    nz = 0
    for st in _states(model, count, seed):
        nz += _outside(mask, mminv_gen(model, st.q, False, True)[1])
    return CheckResult("minv-sparsity", nz == 0, float(nz), 0.0,
                       "" if nz == 0 else f"{nz} nonzeros outside the branch pattern")


CHECKS = (
    check_positive_definite,
    check_inverse,
    check_unit_acceleration,
    check_linearity,
    check_roundtrip,
    check_derivatives,
    check_sparsity,
    check_minv_sparsity,
)


def run_checks(model: RobotModel, count: int = 20, seed: int = 0) -> list[CheckResult]:
    """Run every check on ``count`` seeded states.  A check that raises is
    reported as a failure carrying the exception text."""
    results = []
    for check in CHECKS:
        try:
            results.append(check(model, count, seed))
        except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
            name = check.__name__.removeprefix("check_").replace("_", "-")
            results.append(CheckResult(name, False, float("nan"), 0.0, f"{type(exc).__name__}: {exc}"))
    return results
