import numpy as np
import pytest

from rbdpipe.dynamics import (
    DimensionError,
    FunctionId,
    RobotState,
    dfd,
    difd,
    drnea,
    evaluate,
    fd,
    inverse_dynamics,
    mass_matrix,
    mass_matrix_inverse,
    random_states,
)
from oracles import jacobian_fd, rel_max


def test_function_id_parse():
    assert FunctionId.parse("difd") is FunctionId.DIFD
    assert FunctionId.parse("MINV") is FunctionId.MINV
    with pytest.raises(ValueError, match="unknown function"):
        FunctionId.parse("ABA")


def test_fd_roundtrip(model):
    for st in random_states(model, 5, 31, function="FD", with_fext=True):
        qdd = fd(model, st.q, st.qd, st.qdd_or_tau, st.f_ext)
        assert rel_max(inverse_dynamics(model, st.q, st.qd, qdd, st.f_ext), st.qdd_or_tau) < 1e-9


def test_dfd_against_finite_differences(model):
    for st in random_states(model, 2, 32, function="dFD", with_fext=True):
        q, qd, tau, f = st.q, st.qd, st.qdd_or_tau, st.f_ext
        blocks, _ = dfd(model, q, qd, tau, f)
        assert rel_max(blocks.d_dq, jacobian_fd(lambda x: fd(model, x, qd, tau, f), q)) < 1e-5
        assert rel_max(blocks.d_dqd, jacobian_fd(lambda x: fd(model, q, x, tau, f), qd)) < 1e-5


def test_dfd_is_minus_minv_did(models):
    m = models["quadruped_arm"]
    st = random_states(m, 1, 33)[0]
    blocks, Minv = dfd(m, st.q, st.qd, st.qdd_or_tau, out_minv=True)
    qdd = fd(m, st.q, st.qd, st.qdd_or_tau)
    d = drnea(m, st.q, st.qd, qdd)
    np.testing.assert_allclose(blocks.d_dq, -Minv @ d.d_dq, rtol=0, atol=1e-10)
    assert dfd(m, st.q, st.qd, st.qdd_or_tau)[1] is None


def test_difd_equals_dfd_given_fd_outputs(model):
    st = random_states(model, 1, 34, function="dFD")[0]
    blocks, Minv = dfd(model, st.q, st.qd, st.qdd_or_tau, out_minv=True)
    qdd = fd(model, st.q, st.qd, st.qdd_or_tau)
    again = difd(model, st.q, st.qd, qdd, Minv)
    assert np.array_equal(again.d_dq, blocks.d_dq) and np.array_equal(again.d_dqd, blocks.d_dqd)


def test_difd_checks_minv_shape(models):
    m = models["iiwa"]
    z = np.zeros(7)
    with pytest.raises(DimensionError):
        difd(m, z, z, z, np.eye(6))


def test_evaluate_dispatch(models):
    m = models["iiwa"]
    st = random_states(m, 1, 35)[0]
    assert np.array_equal(evaluate(m, "ID", st), inverse_dynamics(m, st.q, st.qd, st.qdd_or_tau))
    assert np.array_equal(evaluate(m, "M", st), mass_matrix(m, st.q))
    assert np.array_equal(evaluate(m, "Minv", st), mass_matrix_inverse(m, st.q))
    assert np.array_equal(evaluate(m, "FD", st), fd(m, st.q, st.qd, st.qdd_or_tau))
    only_q = RobotState(st.q)
    assert np.array_equal(evaluate(m, "ID", only_q), inverse_dynamics(m, st.q, 0 * st.q, 0 * st.q))


def test_random_states_for_difd_carry_fd_outputs(models):
    m = models["iiwa"]
    st = random_states(m, 1, 36, function="diFD")[0]
    assert st.minv is not None
    np.testing.assert_allclose(st.minv, mass_matrix_inverse(m, st.q), atol=1e-14)


def test_random_states_are_seeded(models):
    a = random_states(models["humanoid"], 3, 7)
    b = random_states(models["humanoid"], 3, 7)
    assert all(np.array_equal(x.q, y.q) for x, y in zip(a, b))
    pitch = models["humanoid"].dof_offset[0] + 1
    assert all(abs(s.q[pitch]) <= 1.2 for s in a)


def test_world_wrenches_match_gravity(model):
    # the weight of every link, applied as a world-frame wrench, stands in for gravity
    from dataclasses import replace

    from rbdpipe.dynamics import link_transforms, world_wrenches_to_local

    st = random_states(model, 1, 37)[0]
    q, qd, qdd = st.q, st.qd, st.qdd_or_tau
    g = np.asarray(model.gravity, float)
    f_world = np.zeros((model.n_bodies, 6))
    for i, X in enumerate(link_transforms(model, q)):
        I = model.links[i].inertia
        m = float(I.mass)
        if m > 0:
            com = X.translation + X.rotation.T @ (np.asarray(I.com_moment, float) / m)
            f_world[i] = np.concatenate([np.cross(com, m * g), m * g])
    weightless = replace(model, gravity=np.zeros(3))
    local = world_wrenches_to_local(model, q, f_world)
    np.testing.assert_allclose(inverse_dynamics(weightless, q, qd, qdd, local),
                               inverse_dynamics(model, q, qd, qdd), rtol=0, atol=1e-10)
