import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rbdpipe import spatial as sp
from oracles import crf, crm, plucker, rodrigues

finite = st.floats(-10, 10, allow_nan=False)
vec3 = arrays(float, 3, elements=finite)
vec6 = arrays(float, 6, elements=finite)
unit = vec3.filter(lambda a: np.linalg.norm(a) > 1e-3).map(lambda a: a / np.linalg.norm(a))


def transform(axis, angle, r):
    return sp.SpatialTransform(rodrigues(axis, angle).T, np.asarray(r, float))


@settings(max_examples=60, deadline=None)
@given(unit, finite, vec3, vec6)
def test_motion_transform_matches_dense(axis, angle, r, v):
    X = transform(axis, angle, r)
    np.testing.assert_allclose(sp.xform_motion(X, v), plucker(X.rotation, r) @ v, atol=1e-12)
    np.testing.assert_allclose(X.dense(), plucker(X.rotation, r), atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(unit, finite, vec3, vec6)
def test_force_transpose_matches_dense(axis, angle, r, f):
    X = transform(axis, angle, r)
    np.testing.assert_allclose(sp.xform_force_transpose(X, f), plucker(X.rotation, r).T @ f, atol=1e-11)


@settings(max_examples=60, deadline=None)
@given(vec6, vec6)
def test_cross_products(v, m):
    np.testing.assert_allclose(sp.cross_motion(v, m), crm(v) @ m, atol=1e-12)
    np.testing.assert_allclose(sp.cross_force(v, m), crf(v) @ m, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(unit, finite, vec3, unit, finite, vec3, vec6)
def test_compose_and_inverse(a1, t1, r1, a2, t2, r2, v):
    A, B = transform(a1, t1, r1), transform(a2, t2, r2)
    AB = A.compose(B)
    np.testing.assert_allclose(AB.dense(), A.dense() @ B.dense(), atol=1e-10)
    np.testing.assert_allclose(sp.xform_motion(A.inverse(), sp.xform_motion(A, v)), v, atol=1e-10)


def test_inertia_from_com_is_parallel_axis():
    m, c = 2.0, np.array([0.1, -0.2, 0.3])
    Ic = np.diag([0.1, 0.2, 0.3])
    I = sp.SpatialInertia.from_com(m, c, Ic)
    D = I.dense()
    np.testing.assert_allclose(D[3:, 3:], m * np.eye(3))
    np.testing.assert_allclose(D[:3, :3], Ic + m * (c @ c * np.eye(3) - np.outer(c, c)))
    v = np.arange(6.0)
    np.testing.assert_allclose(sp.inertia_apply(I, v), D @ v)


def test_inertia_transform_is_congruence():
    I = sp.SpatialInertia.from_com(1.5, [0.05, 0.0, 0.2], np.diag([0.02, 0.03, 0.01]))
    X = transform(np.array([0.0, 0.6, 0.8]), 0.7, [0.1, 0.2, -0.3])
    out = sp.inertia_transform(X, I)
    np.testing.assert_allclose(out.dense(), X.dense().T @ I.dense() @ X.dense(), atol=1e-14)


def test_batched_ops_equal_single_calls():
    rng = np.random.default_rng(0)
    E = np.stack([rodrigues(a / np.linalg.norm(a), t).T for a, t in zip(rng.normal(size=(5, 3)), rng.normal(size=5))])
    r = rng.normal(size=(5, 3))
    v = rng.normal(size=(5, 6))
    X = sp.SpatialTransform(E, r)
    batched = sp.xform_motion(X, v)
    for i in range(5):
        single = sp.xform_motion(sp.SpatialTransform(E[i], r[i]), v[i])
        assert np.array_equal(batched[i], single)
