import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helmopen.errors import InsideObstacle
from helmopen.exact import ModeSolution, exact_mode, exact_mode_gradient, outgoing_flux, series_solution
from helmopen.special import hankel1


@settings(max_examples=30, deadline=None)
@given(j=st.integers(0, 6), k=st.floats(0.3, 4.0), theta=st.floats(-math.pi, math.pi))
def test_boundary_value(j, k, theta):
    sol = ModeSolution(j, k, 0.5)
    u = exact_mode(sol, (0.5 * math.cos(theta), 0.5 * math.sin(theta)))
    assert abs(u - math.cos(j * theta)) < 1e-12


def test_known_value():
    u = exact_mode(ModeSolution(0, 1.0, 0.5), (1.0, 0.0))
    assert abs(u - hankel1(0, 1.0) / hankel1(0, 0.5)) < 1e-14


def test_far_field_decay():
    sol = ModeSolution(2, 1.0, 0.5)
    amp = []
    for r in (50.0, 100.0):
        amp.append(abs(exact_mode(sol, (r, 0.0))) * math.sqrt(r))
    assert abs(amp[0] / amp[1] - 1) < 0.01


def test_radial_gradient_for_j0():
    g = exact_mode_gradient(ModeSolution(0, 1.5, 0.5), (1.3, 0.0))
    assert abs(g[1]) < 1e-14


@pytest.mark.parametrize("j", [0, 2, 3])
def test_gradient_finite_difference(j):
    sol = ModeSolution(j, 1.0, 0.5)
    p = np.array([0.8, 0.6])
    g = exact_mode_gradient(sol, p)
    h = 1e-6 * np.linalg.norm(p)
    for d in range(2):
        e = np.zeros(2)
        e[d] = h
        fd = (exact_mode(sol, p + e) - exact_mode(sol, p - e)) / (2 * h)
        assert abs(fd - g[d]) <= 1e-7 * max(1.0, abs(g[d]))


@pytest.mark.parametrize("j,k", [(0, 1.0), (3, 2.0)])
def test_helmholtz_residual(j, k):
    sol = ModeSolution(j, k, 0.5)
    p = np.array([1.1, -0.7])
    h = 1e-3
    lap = sum(exact_mode(sol, p + s) for s in ([h, 0], [-h, 0], [0, h], [0, -h])) - 4 * exact_mode(sol, p)
    assert abs(lap / h**2 + k**2 * exact_mode(sol, p)) < 1e-5


def test_inside_obstacle():
    with pytest.raises(InsideObstacle):
        exact_mode(ModeSolution(0, 1.0, 0.5), (0.3, 0.0))


def test_series_matches_single_mode():
    pts = np.array([[0.7, 0.2], [1.5, -1.0], [0.0, 3.0]])
    g = lambda th: np.cos(2 * th)
    u = series_solution(g, 1.0, 0.5, pts)
    assert np.allclose(u, ModeSolution(2, 1.0, 0.5)(pts), atol=1e-10)


def test_series_mixture_trace():
    g = lambda th: 1 + 0.5 * np.sin(th) - 0.25 * np.cos(3 * th)
    t = np.linspace(0, 2 * np.pi, 17)
    pts = 0.5 * np.column_stack([np.cos(t), np.sin(t)])
    assert np.allclose(series_solution(g, 1.3, 0.5, pts), g(t), atol=1e-10)


def test_outgoing_flux_closed_form():
    # Im(H' conj H) = 2/(pi x) gives 4 / |H0(k r_hat)|^2
    k, rh = 1.0, 0.5
    assert outgoing_flux(k, rh) == pytest.approx(4 / abs(hankel1(0, k * rh)) ** 2, rel=1e-14)
    sol = ModeSolution(0, k, rh)
    for rho in (0.8, 2.5):
        u = exact_mode(sol, (rho, 0.0))
        ur = exact_mode_gradient(sol, (rho, 0.0))[0]
        flux = (ur * u.conjugate()).imag * 2 * math.pi * rho
        assert flux == pytest.approx(outgoing_flux(k, rh), rel=1e-12)
