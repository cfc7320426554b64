r"""The radiation functional and the diagnostics built on it.

For a P1 field ``u`` the functional is

.. math::
    J(u) = \int_\Omega w(x)\,|\nabla u - i k n u \hat x|^2\,dx,
    \qquad w = 1 \text{ or } (1 + |x|)^{-1},

evaluated with the same 7-point rule as the assembly. Because the residual
is linear in the nodal vector, ``J(u) = Re(u^H Q u)`` for a Hermitian
positive semidefinite sparse matrix ``Q``; its real-linear gradient is
``2 Q u`` with the pairing ``Re(g^H du)``.
"""

import weakref
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import CircleOutsideDomain, InadmissibleRefraction, OriginInDomain
from .geometry import QUAD_BARY
from .refraction import Constant, check_admissibility

__all__ = [
    "FunctionalConfig",
    "FunctionalValue",
    "SeminormCheck",
    "eval_J",
    "radiation_matrix",
    "gradient_source",
    "imaginary_flux",
    "energy_norm_sq",
    "seminorm_bound_check",
    "quadratic_value",
]


@dataclass(frozen=True)
class FunctionalConfig:
    weighted: bool = False


@dataclass(frozen=True, eq=False)
class FunctionalValue:
    J: float
    residual: np.ndarray  # (T, 7, 2) complex, at the quadrature points


@dataclass(frozen=True)
class SeminormCheck:
    lhs: float
    rhs: float
    holds: bool


def _model(refraction):
    return Constant(1.0) if refraction is None else refraction


def _weights(mesh, config, mask):
    """Quadrature weights times the optional radial weight and region mask."""
    w = mesh.quad_weights
    r = np.linalg.norm(mesh.quad_points, axis=-1)
    if np.any(r == 0.0):
        raise OriginInDomain("a quadrature point sits at the origin")
    if config.weighted:
        w = w / (1.0 + r)
    if mask is not None:
        w = w * mask.element_weights[:, None]
    return w


def _unit_radial(mesh):
    q = mesh.quad_points
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def eval_J(u, mesh, k, refraction=None, config=FunctionalConfig(), mask=None):
    """Value of the functional and its residual at the quadrature points."""
    u = np.asarray(u, dtype=complex)
    w = _weights(mesh, config, mask)
    n = _model(refraction)(mesh.quad_points)
    ut = u[mesh.triangles]
    grad = np.einsum("tad,ta->td", mesh.basis_gradients, ut)
    uq = ut @ QUAD_BARY.T
    res = grad[:, None, :] - 1j * k * (n * uq)[..., None] * _unit_radial(mesh)
    J = float(np.sum(w * np.sum(res.real**2 + res.imag**2, axis=-1)))
    return FunctionalValue(J, res)


_Q_CACHE = weakref.WeakKeyDictionary()


def radiation_matrix(mesh, k, refraction=None, config=FunctionalConfig(), mask=None, chunk=100_000):
    """Hermitian ``Q`` with ``J(u) = Re(u^H Q u)``; cached for unmasked calls."""
    refraction = _model(refraction)
    key = (float(k), refraction, config)
    if mask is None:
        hit = _Q_CACHE.get(mesh, {}).get(key)
        if hit is not None:
            return hit
    w = _weights(mesh, config, mask)
    xhat = _unit_radial(mesh)
    n = refraction(mesh.quad_points)
    G = mesh.basis_gradients
    T = mesh.n_triangles
    local = np.empty((T, 3, 3), dtype=complex)
    for s in range(0, T, chunk):
        e = slice(s, min(s + chunk, T))
        # A[t, q, a, :] = grad phi_a - i k n phi_a(x_q) xhat_q
        A = G[e][:, None, :, :] - 1j * k * (n[e][:, :, None, None] * QUAD_BARY[None, :, :, None]) * xhat[e][:, :, None, :]
        local[e] = np.einsum("tq,tqad,tqbd->tab", w[e], A.conj(), A)
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    Q = sp.csr_matrix((local.ravel(), (rows, cols)), shape=(mesh.n_vertices,) * 2)
    if mask is None:
        _Q_CACHE.setdefault(mesh, {})[key] = Q
    return Q


def quadratic_value(Q, u):
    return float(np.real(np.vdot(u, Q @ u)))


def gradient_source(u, mesh, k, refraction=None, config=FunctionalConfig(), mask=None):
    """Nodal representation ``2 Q u`` of the derivative of ``J`` at ``u``.

    The directional derivative is ``Re(vdot(gradient_source(u), du))``.
    The vector has one entry per mesh vertex; the adjoint solver keeps the
    free entries.
    """
    Q = radiation_matrix(mesh, k, refraction, config, mask)
    return 2.0 * (Q @ np.asarray(u, dtype=complex))


def imaginary_flux(u, mesh, rho, n_points=256):
    """``Im of the integral of u_r conj(u)`` over the circle ``|x| = rho``."""
    t = 2 * np.pi * np.arange(n_points) / n_points
    pts = np.column_stack([rho * np.cos(t), rho * np.sin(t)])
    elem, _ = mesh.locate(pts)
    if np.any(elem < 0):
        raise CircleOutsideDomain(f"circle of radius {rho} leaves the mesh")
    vals, grads, _ = mesh.evaluate(u, pts)
    u_r = (grads * pts).sum(axis=1) / rho
    return float(np.imag(u_r * np.conj(vals)).sum() * 2 * np.pi * rho / n_points)


def energy_norm_sq(u, mesh, k, refraction=None, mask=None):
    """Weighted energy ``int (|grad u|^2 + k^2 n^2 |u|^2) / (1 + |x|)``."""
    u = np.asarray(u, dtype=complex)
    w = _weights(mesh, FunctionalConfig(weighted=True), mask)
    n = _model(refraction)(mesh.quad_points)
    ut = u[mesh.triangles]
    grad = np.einsum("tad,ta->td", mesh.basis_gradients, ut)
    g2 = np.sum(grad.real**2 + grad.imag**2, axis=-1)
    uq = ut @ QUAD_BARY.T
    return float(np.sum(w * (g2[:, None] + k**2 * n**2 * np.abs(uq) ** 2)))


def seminorm_bound_check(u, mesh, k, refraction=None, r_max=None, tol=0.05, mask=None):
    """Compare the weighted energy of ``u`` with ``[u]_R^2 / (1 - sup dev)``.

    Intended for solutions with homogeneous inner data (differences and
    variations of discrete solutions).
    """
    refraction = _model(refraction)
    if r_max is None:
        r_max = float(np.linalg.norm(mesh.vertices, axis=1).max())
    dev = check_admissibility(refraction, r_max).sup_deviation if not refraction.is_constant else 0.0
    if dev >= 1.0:
        raise InadmissibleRefraction(f"sup |1 - n_sharp/n| = {dev:.3g} >= 1")
    lhs = energy_norm_sq(u, mesh, k, refraction, mask)
    rhs = eval_J(u, mesh, k, refraction, FunctionalConfig(weighted=True), mask).J / (1.0 - dev)
    return SeminormCheck(lhs, rhs, lhs <= rhs * (1.0 + tol))

