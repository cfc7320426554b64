import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from helmopen.errors import CircleOutsideDomain, InadmissibleRefraction
from helmopen.exact import ModeSolution, outgoing_flux
from helmopen.functional import (
    FunctionalConfig,
    eval_J,
    gradient_source,
    imaginary_flux,
    radiation_matrix,
    seminorm_bound_check,
)
from helmopen.geometry import DomainSpec, Region, Shape, build_mesh, region_mask
from helmopen.refraction import AngularLinear, Constant, GaussianPair
from helmopen.special import hankel1, hankel1_derivative

UNW, W = FunctionalConfig(False), FunctionalConfig(True)


def _rand(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@pytest.fixture(scope="module")
def annulus4():
    return build_mesh(DomainSpec(Shape.ANNULUS, 0.5, 4.0), 0.05, inner_h=0.02)


def test_zero_field(annulus2):
    u = np.zeros(annulus2.n_vertices)
    assert eval_J(u, annulus2, 1.0).J == 0.0
    assert not np.any(gradient_source(u, annulus2, 1.0))
    assert seminorm_bound_check(u, annulus2, 1.0).holds


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(-5, 5))
def test_quadratic_form_identities(annulus2, seed, alpha):
    rng = np.random.default_rng(seed)
    u, v = _rand(rng, annulus2.n_vertices), _rand(rng, annulus2.n_vertices)
    J = lambda w: eval_J(w, annulus2, 1.0, GaussianPair(), W).J
    Ju, Jv = J(u), J(v)
    assert J(alpha * u) == pytest.approx(alpha**2 * Ju, rel=1e-12, abs=1e-300)
    assert J(u + v) + J(u - v) == pytest.approx(2 * Ju + 2 * Jv, rel=1e-12)
    assert J(u) >= 0


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_gradient_matches_finite_differences(annulus2, seed):
    rng = np.random.default_rng(seed)
    u, du = _rand(rng, annulus2.n_vertices), _rand(rng, annulus2.n_vertices)
    ctx = (annulus2, 1.3, AngularLinear(0.1), W)
    J = lambda w: eval_J(w, *ctx).J
    t = 1e-5
    fd = (J(u + t * du) - J(u - t * du)) / (2 * t)
    g = gradient_source(u, *ctx)
    assert abs(fd - np.real(np.vdot(g, du))) <= 1e-6 * (1 + abs(J(u)))
    assert np.allclose(gradient_source(-2.5 * u, *ctx), -2.5 * g)


def test_matrix_and_pointwise_forms_agree(annulus2):
    rng = np.random.default_rng(42)
    u = _rand(rng, annulus2.n_vertices)
    for model in (Constant(), GaussianPair()):
        for cfg in (UNW, W):
            Q = radiation_matrix(annulus2, 1.1, model, cfg)
            assert abs(Q - Q.conj().T).max() < 1e-13
            assert np.real(np.vdot(u, Q @ u)) == pytest.approx(eval_J(u, annulus2, 1.1, model, cfg).J, rel=1e-12)


def test_weighted_below_unweighted(annulus2):
    rng = np.random.default_rng(42)
    u = _rand(rng, annulus2.n_vertices)
    assert eval_J(u, annulus2, 1.0, None, W).J <= eval_J(u, annulus2, 1.0, None, UNW).J


def test_full_mask_equals_unmasked(annulus2):
    rng = np.random.default_rng(42)
    u = _rand(rng, annulus2.n_vertices)
    full = region_mask(annulus2, Region.FULL)
    assert eval_J(u, annulus2, 1.0, mask=full).J == eval_J(u, annulus2, 1.0).J


def _radial_J(H, dH, k, r_hat, R):
    """Closed-form J of u = H(kr)/H(k r_hat) on the annulus, by adaptive quadrature."""
    h0 = abs(H(k * r_hat)) ** 2
    res = lambda r: abs(k * dH(k * r) - 1j * k * H(k * r)) ** 2 / h0 * 2 * math.pi * r
    grad = lambda r: abs(k * dH(k * r)) ** 2 / h0 * 2 * math.pi * r
    return quad(res, r_hat, R, limit=200)[0], quad(grad, r_hat, R, limit=200)[0]


def test_outgoing_and_incoming_modes(annulus4):
    k, r_hat, R = 1.0, 0.5, 4.0
    out = ModeSolution(0, k, r_hat)(annulus4.vertices)
    J_out = eval_J(out, annulus4, k).J
    J_in = eval_J(out.conj(), annulus4, k).J
    g2 = eval_J(out, annulus4, 0.0).J  # k = 0 leaves int |grad u|^2

    # independent oracle: closed-form radial integrands
    H1 = lambda x: hankel1(0, x)
    dH1 = lambda x: hankel1_derivative(0, x)
    H2 = lambda x: hankel1(0, x).conjugate()
    dH2 = lambda x: hankel1_derivative(0, x).conjugate()
    ref_out, ref_g2 = _radial_J(H1, dH1, k, r_hat, R)
    ref_in, _ = _radial_J(H2, dH2, k, r_hat, R)
    assert J_out == pytest.approx(ref_out, rel=0.05)
    assert J_in == pytest.approx(ref_in, rel=0.01)
    assert g2 == pytest.approx(ref_g2, rel=0.01)


def _mode_ratios(mesh):
    out = ModeSolution(0, 1.0, 0.5)(mesh.vertices)
    J_out = eval_J(out, mesh, 1.0).J
    return J_out / eval_J(out, mesh, 0.0).J, eval_J(out.conj(), mesh, 1.0).J / J_out


def test_mode_ratios_on_omega4(annulus4):
    # closed-form values on this annulus are 0.0844 and 43, so both bounds fail
    small, large = _mode_ratios(annulus4)
    assert small <= 0.05
    assert large >= 50


def test_mode_ratios_on_omega8():
    small, large = _mode_ratios(build_mesh(DomainSpec(Shape.ANNULUS, 0.5, 8.0), 0.1, inner_h=0.02))
    assert small <= 0.05
    assert large >= 50


def test_flux_of_interpolated_outgoing_mode(annulus4):
    u = ModeSolution(0, 1.0, 0.5)(annulus4.vertices)
    target = outgoing_flux(1.0, 0.5)
    fluxes = np.array([imaginary_flux(u, annulus4, rho) for rho in (0.75, 1.0, 2.0, 3.5)])
    assert np.ptp(fluxes) <= 0.02 * abs(fluxes.mean())
    assert np.allclose(fluxes, target, rtol=0.02)


def test_flux_circle_outside(annulus2):
    with pytest.raises(CircleOutsideDomain):
        imaginary_flux(np.ones(annulus2.n_vertices), annulus2, 2.5)


def test_seminorm_check_rejects_inadmissible(annulus2):
    with pytest.raises(InadmissibleRefraction):
        seminorm_bound_check(np.ones(annulus2.n_vertices), annulus2, 1.0, GaussianPair())
