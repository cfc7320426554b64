"""Conjugate gradients on the reduced quadratic ``q(f) = J(u(f))``.

The state map ``f -> u(f)`` is affine, so ``q`` is a convex quadratic in
the real and imaginary parts of the outer data ``f``. Each iteration costs
two solves with the already factorized operator: the variation field of
the search direction and the adjoint field that turns it into a Hessian
action. Inner products between boundary data use the outer-boundary mass
matrix, which makes iteration counts roughly mesh independent.

With Neumann control the Riesz gradient is simply the outer trace of the
adjoint field ``p`` solving ``K p = 2 Q u``. With Dirichlet control the
Euclidean gradient is ``(2Qu)_G - K_GI p_I`` and the Riesz map applies the
inverse boundary mass matrix.
"""

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import NotConverged, StagnationError
from .fem import OuterKind
from .functional import FunctionalConfig, quadratic_value, radiation_matrix

__all__ = ["CgmConfig", "CgmStep", "CgmRun", "minimize", "minimized_seminorm", "reduced_gradient", "write_trace"]

RESTART_EVERY = 50


def _num(x):
    """Round-trippable decimal text for a real number."""
    return repr(float(x))


@dataclass(frozen=True)
class CgmConfig:
    epsilon: float = 1e-8
    max_iterations: int = 500
    initial_f: object = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class CgmStep:
    m: int
    J: float
    grad_norm: float
    rho: float
    gamma: float
    beta: float = 0.0


@dataclass(eq=False)
class CgmRun:
    """Outcome of :func:`minimize`.

    ``history[m].gamma`` is the stopping scalar ``|g_m| / |g_0|`` (mass
    norm); ``beta`` is the Fletcher-Reeves coefficient used for the next
    direction and ``rho`` the exact step length.
    """

    f_star: np.ndarray
    u_star: np.ndarray
    history: list
    converged: bool
    problem: object = None
    functional: FunctionalConfig = field(default_factory=FunctionalConfig)

    @property
    def iterations(self):
        return self.history[-1].m if self.history else 0

    @property
    def J(self):
        return self.history[-1].J


class _Reduced:
    """Reduced maps for one problem: state, Riesz gradient, Hessian action."""

    def __init__(self, problem, functional):
        self.problem = problem
        self.op = problem.operator
        self.Q = radiation_matrix(problem.mesh, problem.k, problem.refraction, functional)
        self.dirichlet = self.op.outer_kind is OuterKind.DIRICHLET
        if self.dirichlet:
            # K_II and K_{I,outer} blocks; free == interior here
            self.K_of = self.op.matrix[self.op.outer][:, self.op.free].tocsr()

    def state(self, f):
        return self.op.field(self.problem.g, f)

    def variation(self, d):
        return self.op.field(None, d)

    def riesz_gradient(self, source):
        """Mass-Riesz representative on the outer boundary of ``v -> Re(vdot(source, u'(f) v))``."""
        p = self.op.field(free_rhs=source[self.op.free])
        if not self.dirichlet:
            return p[self.op.outer]
        e = source[self.op.outer] - self.K_of @ p[self.op.free]
        return self.op.outer_mass_solve(e)

    def inner(self, a, b):
        return float(np.real(np.vdot(a, self.op.M_out @ b)))


def reduced_gradient(problem, f, functional=FunctionalConfig()):
    """Riesz gradient of ``q`` at ``f`` (mass inner product on the outer boundary)."""
    red = _Reduced(problem, functional)
    u = red.state(np.asarray(f, dtype=complex))
    return red.riesz_gradient(2.0 * (red.Q @ u))


def minimize(problem, functional=FunctionalConfig(), config=CgmConfig(), trace=None):
    """Minimize ``J(u(f))`` over outer data ``f`` by conjugate gradients.

    Raises :class:`StagnationError` if the curvature along a search
    direction is not positive. ``trace`` may be a path for a CSV history.
    """
    red = _Reduced(problem, functional)
    n_out = len(red.op.outer)
    f = np.zeros(n_out, dtype=complex) if config.initial_f is None else np.array(config.initial_f, dtype=complex)
    if f.shape != (n_out,):
        raise ValueError(f"initial_f must have {n_out} entries")
    u = red.state(f)
    J = quadratic_value(red.Q, u)
    r = -red.riesz_gradient(2.0 * (red.Q @ u))
    rr = red.inner(r, r)
    norm0 = math.sqrt(rr)
    history = [CgmStep(0, J, norm0, 0.0, 1.0 if norm0 > 0 else 0.0)]
    converged = norm0 == 0.0
    d = r.copy()
    m = 0
    while not converged and m < config.max_iterations:
        m += 1
        du = red.variation(d)
        curv = 2.0 * quadratic_value(red.Q, du)
        if not curv > 0:
            raise StagnationError(f"non-positive curvature {curv:.3e} at iteration {m}")
        rho = red.inner(r, d) / curv
        f += rho * d
        u += rho * du
        J_new = quadratic_value(red.Q, u)
        if m % RESTART_EVERY == 0:
            r_new = -red.riesz_gradient(2.0 * (red.Q @ u))
        else:
            r_new = r - rho * red.riesz_gradient(2.0 * (red.Q @ du))
        rr_new = red.inner(r_new, r_new)
        beta = 0.0 if m % RESTART_EVERY == 0 else rr_new / rr
        gnorm = math.sqrt(max(rr_new, 0.0))
        gamma = gnorm / norm0
        history.append(CgmStep(m, J_new, gnorm, rho, gamma, beta))
        r, rr, J = r_new, rr_new, J_new
        d = r + beta * d
        converged = gamma <= config.epsilon
    run = CgmRun(f, u, history, converged, problem, functional)
    if trace is not None:
        write_trace(run, trace)
    return run


def write_trace(run, path):
    tmp = str(path) + ".partial"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "J", "grad_norm", "rho", "gamma"])
        for s in run.history:
            w.writerow([s.m, _num(s.J), _num(s.grad_norm), _num(s.rho), _num(s.gamma)])
    os.replace(tmp, path)


def minimized_seminorm(run):
    """``d_R = sqrt(J(u_star))`` for a converged run with the weighted functional."""
    if not run.converged:
        raise NotConverged("the run did not reach its tolerance")
    if not run.functional.weighted:
        raise ValueError("d_R is defined with the weighted functional")
    return math.sqrt(max(run.J, 0.0))
