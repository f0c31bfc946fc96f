import numpy as np
import pytest

from rbdpipe.dynamics import trig_approx


def test_matches_numpy_over_working_range():
    x = np.random.default_rng(0).uniform(-50, 50, 200_000)
    s, c = trig_approx(x)
    assert np.max(np.abs(s - np.sin(x))) < 1e-15
    assert np.max(np.abs(c - np.cos(x))) < 1e-15


@pytest.mark.parametrize("x", [0.0, np.pi / 4, np.pi / 2, np.pi, -3 * np.pi / 4, 1e6, 5e7, 1e15, -1e22, 1.7e308])
def test_large_and_special_arguments(x):
    s, c = trig_approx(np.array([x]))
    assert abs(s[0] - np.sin(x)) <= 1e-9
    assert abs(c[0] - np.cos(x)) <= 1e-9


def test_shapes_and_scalars():
    s, c = trig_approx(0.3)
    assert np.shape(s) == () and s == pytest.approx(np.sin(0.3), abs=1e-15)
    s, c = trig_approx(np.zeros((2, 3, 4)))
    assert s.shape == c.shape == (2, 3, 4)


def test_pythagorean_identity():
    x = np.linspace(-100, 100, 10001)
    s, c = trig_approx(x)
    assert np.max(np.abs(s * s + c * c - 1)) < 1e-15
