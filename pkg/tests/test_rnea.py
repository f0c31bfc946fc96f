import numpy as np
import pytest

from rbdpipe.dynamics import DimensionError, inverse_dynamics, random_states, rnea
from rbdpipe.model import RootMode
from oracles import lagrangian_id, rel_max, rnea_dense


def test_matches_dense_oracle(model):
    for st in random_states(model, 10, 1, with_fext=True):
        tau = inverse_dynamics(model, st.q, st.qd, st.qdd_or_tau, st.f_ext)
        assert rel_max(tau, rnea_dense(model, st.q, st.qd, st.qdd_or_tau, st.f_ext)) < 1e-13


def test_matches_lagrangian(model):
    # energy-based reference; limited by finite differencing
    for st in random_states(model, 2, 2):
        tau = inverse_dynamics(model, st.q, st.qd, st.qdd_or_tau)
        assert rel_max(tau, lagrangian_id(model, st.q, st.qd, st.qdd_or_tau)) < 1e-8


def test_strategies_are_bit_identical(model):
    for st in random_states(model, 5, 3, with_fext=True):
        a, _ = rnea(model, st.q, st.qd, st.qdd_or_tau, st.f_ext, strategy="pipelined")
        b, _ = rnea(model, st.q, st.qd, st.qdd_or_tau, st.f_ext, strategy="direct")
        assert np.array_equal(a, b)


def test_batched_equals_single(model):
    sts = random_states(model, 6, 4, with_fext=True)
    Q = np.stack([s.q for s in sts])
    QD = np.stack([s.qd for s in sts])
    U = np.stack([s.qdd_or_tau for s in sts])
    F = np.stack([s.f_ext for s in sts])
    batched, _ = rnea(model, Q, QD, U, F)
    for i, s in enumerate(sts):
        single, _ = rnea(model, s.q, s.qd, s.qdd_or_tau, s.f_ext)
        assert np.array_equal(batched[i], single)


def test_static_gravity_load_iiwa(models):
    m = models["iiwa"]
    z = np.zeros(7)
    tau = inverse_dynamics(m, z, z, z)
    # upright arm: gravity acts along every revolute z axis of the odd joints
    assert np.allclose(tau[[0, 2, 4, 6]], 0.0, atol=1e-12)


def test_external_force_enters_through_jacobian_transpose(models):
    m = models["iiwa"]
    rng = np.random.default_rng(5)
    q, qd, qdd = rng.normal(size=(3, 7))
    f = np.zeros((7, 6))
    f[6] = rng.normal(size=6)
    delta = inverse_dynamics(m, q, qd, qdd, f) - inverse_dynamics(m, q, qd, qdd)
    assert rel_max(delta, rnea_dense(m, q, qd, qdd, f) - rnea_dense(m, q, qd, qdd)) < 1e-12


def test_state_injected_base(models):
    h = models["humanoid"].with_root_mode(RootMode.STATE_INJECTED)
    rng = np.random.default_rng(0)
    q, qd, qdd = rng.normal(size=(3, h.n_dof))
    tau0 = inverse_dynamics(h, q, qd, qdd)
    g = np.concatenate([np.zeros(3), -h.gravity])
    # supplying the default base motion explicitly changes nothing
    tau1 = inverse_dynamics(h, q, qd, qdd, base=(np.zeros(6), g))
    assert np.array_equal(tau0, tau1)
    tau2 = inverse_dynamics(h, q, qd, qdd, base=(np.array([0.1, 0, 0, 0, 0, 0]), g))
    assert not np.allclose(tau0, tau2)


def test_base_motion_rejected_for_other_root_modes(models):
    m = models["iiwa"]
    with pytest.raises(DimensionError):
        inverse_dynamics(m, np.zeros(7), np.zeros(7), np.zeros(7), base=(np.zeros(6), np.zeros(6)))


@pytest.mark.parametrize("bad", [np.zeros(6), np.zeros((2, 8)), 0.0])
def test_dimension_errors(models, bad):
    m = models["iiwa"]
    with pytest.raises(DimensionError):
        inverse_dynamics(m, bad, np.zeros(7), np.zeros(7))


def test_fext_shape_error(models):
    m = models["iiwa"]
    with pytest.raises(DimensionError):
        inverse_dynamics(m, np.zeros(7), np.zeros(7), np.zeros(7), np.zeros((6, 6)))
