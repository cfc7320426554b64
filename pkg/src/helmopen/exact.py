"""Closed-form outgoing solutions of the constant-index exterior disk problem.

For Dirichlet data ``g(theta) = cos(j theta)`` on the circle of radius
``r_hat`` the Hankel series collapses to the single mode

    u(r, theta) = H_j(k r) / H_j(k r_hat) * cos(j theta).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsideObstacle
from .special import bessel_table

__all__ = [
    "ModeSolution",
    "exact_mode",
    "exact_mode_gradient",
    "series_solution",
    "outgoing_flux",
]


@dataclass(frozen=True)
class ModeSolution:
    j: int
    k: float
    r_hat: float = 0.5

    def __post_init__(self):
        if self.j < 0 or int(self.j) != self.j:
            raise ValueError("mode index j must be a nonnegative integer")
        if self.k <= 0 or self.r_hat <= 0:
            raise ValueError("k and r_hat must be positive")

    @property
    def boundary_hankel(self):
        jt, yt = bessel_table(self.j, np.array([self.k * self.r_hat]))
        return complex(jt[self.j, 0] + 1j * yt[self.j, 0])

    def values_and_gradients(self, points, tol=1e-10):
        """Vectorized ``(u, grad u)`` at an ``(..., 2)`` array of points."""
        return _mode_eval(self, points, tol, want_grad=True)

    def __call__(self, points, tol=1e-10):
        return _mode_eval(self, points, tol, want_grad=False)[0]


def _mode_eval(sol, points, tol, want_grad):
    pts = np.asarray(points, dtype=float)
    x, y = pts[..., 0], pts[..., 1]
    r = np.hypot(x, y)
    if np.any(r < sol.r_hat * (1.0 - tol)):
        raise InsideObstacle(f"point inside the obstacle |x| < {sol.r_hat}")
    theta = np.arctan2(y, x)
    j = sol.j
    jt, yt = bessel_table(j + 1, sol.k * r)
    h = jt + 1j * yt
    h_hat = sol.boundary_hankel
    c, s = np.cos(j * theta), np.sin(j * theta)
    u = h[j] / h_hat * c
    if not want_grad:
        return u, None
    if j == 0:
        dh = -h[1]
    else:
        dh = h[j - 1] - j / (sol.k * r) * h[j]
    u_r = sol.k * dh / h_hat * c
    u_t = -j * h[j] / h_hat * s / r  # (1/r) du/dtheta
    ct, st = np.cos(theta), np.sin(theta)
    grad = np.stack([u_r * ct - u_t * st, u_r * st + u_t * ct], axis=-1)
    return u, grad


def exact_mode(solution, point):
    """Value of the single-mode outgoing solution at ``point``."""
    return _mode_eval(solution, point, 1e-10, want_grad=False)[0]


def exact_mode_gradient(solution, point):
    """Cartesian gradient of :func:`exact_mode`."""
    return _mode_eval(solution, point, 1e-10, want_grad=True)[1]


def series_solution(g, k, r_hat, points, l_max=40, n_quad=512):
    r"""Truncated Hankel series for general Dirichlet data ``g(theta)``.

    Evaluates

    .. math::
        u = \frac{1}{\pi} \hat\sum_{\ell=0}^{\ell_{max}} \int_0^{2\pi}
            \frac{H_\ell(kr)}{H_\ell(k\hat r)} \cos[\ell(\theta-\tilde\theta)]
            g(\tilde\theta)\, d\tilde\theta

    with the angular integral done by the periodic trapezoid rule, which is
    spectrally accurate for smooth periodic ``g``.
    """
    pts = np.asarray(points, dtype=float)
    r = np.hypot(pts[..., 0], pts[..., 1])
    if np.any(r < r_hat * (1.0 - 1e-10)):
        raise InsideObstacle(f"point inside the obstacle |x| < {r_hat}")
    theta = np.arctan2(pts[..., 1], pts[..., 0])
    tq = 2.0 * np.pi * np.arange(n_quad) / n_quad
    gq = np.asarray(g(tq), dtype=complex)
    a = 2.0 / n_quad * (gq[None, :] * np.cos(np.arange(l_max + 1)[:, None] * tq)).sum(axis=1)
    b = 2.0 / n_quad * (gq[None, :] * np.sin(np.arange(l_max + 1)[:, None] * tq)).sum(axis=1)
    jt, yt = bessel_table(l_max, k * r)
    jh, yh = bessel_table(l_max, np.array([k * r_hat]))
    u = np.zeros(r.shape, dtype=complex)
    for ell in range(l_max + 1):
        ratio = (jt[ell] + 1j * yt[ell]) / (jh[ell, 0] + 1j * yh[ell, 0])
        coef = 0.5 if ell == 0 else 1.0
        # cos(l(t - s)) = cos(l t) cos(l s) + sin(l t) sin(l s)
        u += coef * ratio * (a[ell] * np.cos(ell * theta) + b[ell] * np.sin(ell * theta))
    return u


def outgoing_flux(k, r_hat):
    """Exact ``Im oint u_r conj(u)`` for the j = 0 mode, from the Wronskian.

    ``Im(H_0' conj(H_0)) = 2 / (pi k r)`` so the flux through any circle is
    ``4 / |H_0(k r_hat)|^2``.
    """
    h = ModeSolution(0, k, r_hat).boundary_hankel
    return 4.0 / abs(h) ** 2
