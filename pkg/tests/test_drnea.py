import numpy as np
import pytest

from rbdpipe.dynamics import DimensionError, drnea, inverse_dynamics, random_states, rnea
from rbdpipe.model import sparsity_pattern
from oracles import jacobian_fd, rel_max


def test_against_finite_differences(model):
    for st in random_states(model, 3, 11, with_fext=True):
        q, qd, qdd, f = st.q, st.qd, st.qdd_or_tau, st.f_ext
        d = drnea(model, q, qd, qdd, f)
        assert rel_max(d.d_dq, jacobian_fd(lambda x: inverse_dynamics(model, x, qd, qdd, f), q)) < 1e-6
        assert rel_max(d.d_dqd, jacobian_fd(lambda x: inverse_dynamics(model, q, x, qdd, f), qd)) < 1e-6


def test_structural_zeros(model):
    mask = sparsity_pattern(model)
    for st in random_states(model, 3, 12, with_fext=True):
        d_dq, d_dqd = drnea(model, st.q, st.qd, st.qdd_or_tau, st.f_ext)
        assert not d_dq[~mask].any()
        assert not d_dqd[~mask].any()


def test_reuses_rnea_workspace(models):
    m = models["quadruped_arm"]
    st = random_states(m, 1, 13)[0]
    _, ws = rnea(m, st.q, st.qd, st.qdd_or_tau)
    a = drnea(m, workspace=ws)
    b = drnea(m, st.q, st.qd, st.qdd_or_tau)
    assert np.array_equal(a.d_dq, b.d_dq) and np.array_equal(a.d_dqd, b.d_dqd)


def test_workspace_mismatch_rejected(models):
    m = models["iiwa"]
    _, ws = rnea(m, np.zeros(7), np.zeros(7), np.zeros(7))
    with pytest.raises(DimensionError):
        drnea(m, np.ones(7), workspace=ws)
    with pytest.raises(DimensionError):
        drnea(m)


def test_batched_equals_single(models):
    m = models["humanoid"]
    sts = random_states(m, 4, 14, with_fext=True)
    stack = lambda attr: np.stack([getattr(s, attr) for s in sts])
    B = drnea(m, stack("q"), stack("qd"), stack("qdd_or_tau"), stack("f_ext"))
    for i, s in enumerate(sts):
        one = drnea(m, s.q, s.qd, s.qdd_or_tau, s.f_ext)
        assert np.array_equal(B.d_dq[i], one.d_dq) and np.array_equal(B.d_dqd[i], one.d_dqd)
