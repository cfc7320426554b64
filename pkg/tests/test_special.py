import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helmopen.errors import DomainError
from helmopen.special import bessel_j, bessel_table, bessel_y, hankel1, hankel1_derivative

mpmath.mp.dps = 30


def test_hankel1_order0_at_one():
    # frozen from the ascending series in 30-digit arithmetic
    h = hankel1(0, 1.0)
    assert abs(h - (0.7651976866 + 0.0882569642j)) < 1e-9
    ref = complex(mpmath.besselj(0, 1) + 1j * mpmath.bessely(0, 1))
    assert abs(h - ref) < 1e-14


def test_small_argument_limit():
    assert abs(bessel_j(0, 1e-8) - 1.0) <= 1e-15


@pytest.mark.parametrize("x", [0.5, 1.0, 3.0, 10.0])
def test_wronskian(x):
    J, Y = bessel_j(0, x), bessel_y(0, x)
    dJ, dY = -bessel_j(1, x), -bessel_y(1, x)
    assert abs(dJ * Y - J * dY + 2 / (math.pi * x)) < 1e-11


@pytest.mark.parametrize("x", [-1.0, 0.0])
def test_nonpositive_argument(x):
    with pytest.raises(DomainError):
        hankel1(0, x)


@settings(max_examples=60, deadline=None)
@given(order=st.integers(0, 60), x=st.floats(0.05, 200.0))
def test_against_extended_precision(order, x):
    Jr = float(mpmath.besselj(order, x))
    Yr = float(mpmath.bessely(order, x))
    assert abs(bessel_j(order, x) - Jr) <= 1e-12 * max(1.0, abs(Jr))
    assert abs(bessel_y(order, x) - Yr) <= 1e-12 * max(1.0, abs(Yr))


@settings(max_examples=40, deadline=None)
@given(x=st.floats(0.05, 200.0))
def test_recurrence(x):
    J, Y = bessel_table(40, np.array([x]))
    nu = np.arange(1, 40)
    for T in (J[:, 0], Y[:, 0]):
        lhs = T[nu - 1] + T[nu + 1]
        rhs = 2 * nu / x * T[nu]
        scale = np.maximum(1.0, np.abs(rhs))
        assert np.all(np.abs(lhs - rhs) <= 1e-11 * scale)


def test_derivative_identity():
    for j in (0, 1, 3):
        x = 2.3
        d = hankel1_derivative(j, x)
        fd = (hankel1(j, x + 1e-6) - hankel1(j, x - 1e-6)) / 2e-6
        assert abs(d - fd) < 1e-8
