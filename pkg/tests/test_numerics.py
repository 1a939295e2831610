"""Overflow-safe logistic function."""

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import expit

from fairfront.numerics import sigmoid


def test_sigmoid_survives_extreme_arguments():
    z = np.array([-1e6, -800.0, 0.0, 800.0, 1e6])
    with np.errstate(over="raise"):
        s = sigmoid(z)
    assert s.tolist() == [0.0, 0.0, 0.5, 1.0, 1.0]


def test_sigmoid_matches_scipy_reference():
    z = np.linspace(-40, 40, 4001)
    assert np.allclose(sigmoid(z), expit(z), rtol=0, atol=1e-15)


@given(st.floats(min_value=-700, max_value=700, allow_nan=False))
def test_sigmoid_symmetry(z):
    arr = np.array([z, -z])
    s = sigmoid(arr)
    assert s[0] + s[1] == 1.0 or abs(s[0] + s[1] - 1.0) < 1e-15


@given(st.lists(st.floats(min_value=-100, max_value=100, allow_nan=False), min_size=2, max_size=20))
def test_sigmoid_monotone(vals):
    z = np.sort(np.asarray(vals))
    s = sigmoid(z)
    assert np.all(np.diff(s) >= 0)
