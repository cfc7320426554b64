"""P1 finite elements for ``Delta u + k^2 n^2 u = 0`` outside the hole.

The discrete operator is ``K = S - k^2 M_n`` with ``S`` the P1 stiffness
matrix and ``M_n`` the mass matrix weighted by ``n^2`` (7-point rule). For
real ``k`` and ``n`` the matrix is real symmetric, so one real sparse LU
factorization serves the state, adjoint and variation problems; complex
right-hand sides are solved as two real columns.

With Neumann data ``f = du/dnu`` on the outer boundary the weak form reads
``K u = M_b f`` where ``M_b`` is the outer-boundary mass matrix.

Fields are plain complex numpy arrays with one entry per mesh vertex.
"""

import enum
import os
import weakref
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EmptyFreeDofs, InadmissibleRefraction, SingularSystem
from .geometry import INNER, OUTER, QUAD_BARY
from .refraction import Constant, RefractionModel

__all__ = [
    "OuterKind",
    "HelmholtzProblem",
    "AssembledSystem",
    "HelmholtzOperator",
    "operator_for",
    "stiffness_matrix",
    "mass_matrix",
    "boundary_mass",
    "assemble",
    "solve",
    "solve_state",
    "solve_adjoint",
    "solve_variation",
    "write_field_csv",
    "write_field_vtk",
]

# relative residual after one refinement step; well-posed solves land near 1e-15,
# an exact resonance near 1, strongly varying indices near 1e-10
RESIDUAL_TOL = 1e-8


class OuterKind(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


# ------------------------------------------------------------- matrices


def _scatter(mesh, local):
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = mesh.n_vertices
    return sp.csr_matrix((local.ravel(), (rows, cols)), shape=(n, n))


def stiffness_matrix(mesh):
    """Exact P1 stiffness ``int grad phi_a . grad phi_b``."""
    g = mesh.basis_gradients
    local = mesh.areas[:, None, None] * np.einsum("tad,tbd->tab", g, g)
    return _scatter(mesh, local)


def mass_matrix(mesh, coefficient=None):
    """``int c phi_a phi_b`` with the 7-point rule; ``c`` sampled at quadrature points."""
    w = mesh.quad_weights
    if coefficient is not None:
        w = w * coefficient
    local = np.einsum("tq,qa,qb->tab", w, QUAD_BARY, QUAD_BARY)
    return _scatter(mesh, local)


def boundary_mass(mesh, tag=OUTER):
    """Boundary mass matrix on the edges with ``tag`` (exact for P1)."""
    e = mesh.edges_with_tag(tag)
    length = np.linalg.norm(mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]], axis=1)
    local = length[:, None, None] / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    rows = np.repeat(e, 2, axis=1).ravel()
    cols = np.tile(e, (1, 2)).ravel()
    n = mesh.n_vertices
    return sp.csr_matrix((local.ravel(), (rows, cols)), shape=(n, n))


def _as_model(refraction):
    if refraction is None:
        return Constant(1.0)
    if isinstance(refraction, RefractionModel):
        return refraction
    return Constant(float(refraction))


# ------------------------------------------------------------- operator


class HelmholtzOperator:
    """Factorized ``K`` restricted to the free vertices of one boundary setup.

    Inner vertices are always Dirichlet. Outer vertices are free for
    Neumann control and Dirichlet for Dirichlet control.
    """

    def __init__(self, mesh, k, refraction=None, outer_kind=OuterKind.NEUMANN):
        self.mesh = mesh
        self.k = float(k)
        self.refraction = _as_model(refraction)
        self.outer_kind = OuterKind(outer_kind)
        if self.refraction.lower_bound <= 0:
            raise InadmissibleRefraction("index of refraction must stay positive")
        n_q = self.refraction(mesh.quad_points)
        if np.any(n_q <= 0):
            raise InadmissibleRefraction("index of refraction is not positive on the mesh")
        self.n_quad = n_q
        self.matrix = (stiffness_matrix(mesh) - self.k**2 * mass_matrix(mesh, n_q**2)).tocsr()
        self.inner = mesh.boundary_vertices(INNER)
        self.outer = mesh.boundary_vertices(OUTER)
        fixed = np.zeros(mesh.n_vertices, dtype=bool)
        fixed[self.inner] = True
        if self.outer_kind is OuterKind.DIRICHLET:
            fixed[self.outer] = True
        self.free = np.nonzero(~fixed)[0]
        self.fixed = np.nonzero(fixed)[0]
        if len(self.free) == 0:
            raise EmptyFreeDofs("no free vertices left after imposing Dirichlet data")
        self.free_pos = np.full(mesh.n_vertices, -1, dtype=np.int64)
        self.free_pos[self.free] = np.arange(len(self.free))
        self.K_ff = self.matrix[self.free][:, self.free].tocsc()
        self.K_fd = self.matrix[self.free][:, self.fixed].tocsr()
        self.M_b = boundary_mass(mesh, OUTER)
        self.M_out = self.M_b[self.outer][:, self.outer].tocsc()

    @cached_property
    def _lu(self):
        try:
            return spla.splu(self.K_ff, permc_spec="COLAMD")
        except RuntimeError as exc:
            raise SingularSystem(f"factorization failed: {exc}") from exc

    @cached_property
    def _M_out_lu(self):
        return spla.splu(self.M_out)

    def solve_free(self, rhs):
        """Solve ``K_ff x = rhs`` for complex ``rhs``.

        One step of iterative refinement is applied before the relative
        residual is checked; a residual that stays large means ``k^2 n^2``
        sits on (or next to) a discrete eigenvalue.
        """
        rhs = np.asarray(rhs, dtype=complex)
        b = np.column_stack([rhs.real, rhs.imag])
        x = self._lu.solve(b)
        if not np.all(np.isfinite(x)):
            raise SingularSystem("non-finite solution; operator is singular")
        bn = np.linalg.norm(b)
        if bn > 0:
            x += self._lu.solve(b - self.K_ff @ x)
            res = np.linalg.norm(self.K_ff @ x - b) / bn
            if res > RESIDUAL_TOL:
                raise SingularSystem(f"relative residual {res:.2e}; k^2 n^2 is near a discrete resonance")
        return x[:, 0] + 1j * x[:, 1]

    def outer_mass_solve(self, v):
        v = np.asarray(v, dtype=complex)
        x = self._M_out_lu.solve(np.column_stack([v.real, v.imag]))
        return x[:, 0] + 1j * x[:, 1]

    def field(self, inner_values=None, outer_values=None, free_rhs=None):
        """Full nodal solution for given boundary data.

        ``inner_values`` are Dirichlet values on the inner vertices;
        ``outer_values`` are Neumann data (or Dirichlet values) on the outer
        vertices; ``free_rhs`` is an extra load on the free vertices.
        """
        n = self.mesh.n_vertices
        u = np.zeros(n, dtype=complex)
        if inner_values is not None:
            u[self.inner] = inner_values
        rhs = np.zeros(len(self.free), dtype=complex)
        if outer_values is not None:
            if self.outer_kind is OuterKind.DIRICHLET:
                u[self.outer] = outer_values
            else:
                load = np.zeros(n, dtype=complex)
                load[self.outer] = self.M_out @ np.asarray(outer_values, dtype=complex)
                rhs += load[self.free]
        if free_rhs is not None:
            rhs += free_rhs
        rhs -= self.K_fd @ u[self.fixed]
        u[self.free] = self.solve_free(rhs)
        return u


_CACHE = weakref.WeakKeyDictionary()


def operator_for(mesh, k, refraction=None, outer_kind=OuterKind.NEUMANN):
    """Cached :class:`HelmholtzOperator` (one factorization per setup)."""
    refraction = _as_model(refraction)
    key = (float(k), refraction, OuterKind(outer_kind))
    per_mesh = _CACHE.setdefault(mesh, {})
    op = per_mesh.get(key)
    if op is None:
        op = per_mesh[key] = HelmholtzOperator(mesh, k, refraction, outer_kind)
    return op


# ------------------------------------------------------------- problem


def _boundary_values(mesh, vertices, data):
    if data is None:
        return np.zeros(len(vertices), dtype=complex)
    if callable(data):
        return np.asarray(data(mesh.vertices[vertices]), dtype=complex)
    arr = np.asarray(data, dtype=complex)
    if arr.ndim == 0:
        return np.full(len(vertices), complex(arr))
    if arr.shape != (len(vertices),):
        raise ValueError(f"boundary data has shape {arr.shape}, expected ({len(vertices)},)")
    return arr


@dataclass(eq=False)
class HelmholtzProblem:
    """One Helmholtz boundary value problem on ``mesh``.

    ``inner_data`` is the Dirichlet data on the hole and ``outer_data`` the
    Neumann (or Dirichlet) data on the outer boundary. Each may be a scalar,
    a callable of an ``(m, 2)`` point array, or an array ordered like
    ``mesh.boundary_vertices(tag)``.
    """

    mesh: object
    k: float
    refraction: RefractionModel = field(default_factory=Constant)
    inner_data: object = 1.0
    outer_kind: OuterKind = OuterKind.NEUMANN
    outer_data: object = None

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("wavenumber must be positive")
        self.refraction = _as_model(self.refraction)
        self.outer_kind = OuterKind(self.outer_kind)

    @property
    def operator(self):
        return operator_for(self.mesh, self.k, self.refraction, self.outer_kind)

    @property
    def g(self):
        return _boundary_values(self.mesh, self.operator.inner, self.inner_data)

    @property
    def f(self):
        return _boundary_values(self.mesh, self.operator.outer, self.outer_data)

    def with_outer(self, data):
        return HelmholtzProblem(self.mesh, self.k, self.refraction, self.inner_data, self.outer_kind, data)

    def homogeneous(self):
        """Same operator with zero inner and outer data."""
        return HelmholtzProblem(self.mesh, self.k, self.refraction, 0.0, self.outer_kind, None)


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """``matrix @ x = load`` over the free vertices, plus the fixed values."""

    operator: HelmholtzOperator
    load: np.ndarray
    fixed_values: np.ndarray

    @property
    def matrix(self):
        return self.operator.K_ff

    @property
    def free(self):
        return self.operator.free


def assemble(problem):
    op = problem.operator
    n = problem.mesh.n_vertices
    u = np.zeros(n, dtype=complex)
    u[op.inner] = problem.g
    load = np.zeros(len(op.free), dtype=complex)
    if op.outer_kind is OuterKind.DIRICHLET:
        u[op.outer] = problem.f
    else:
        full = np.zeros(n, dtype=complex)
        full[op.outer] = op.M_out @ problem.f
        load += full[op.free]
    load -= op.K_fd @ u[op.fixed]
    return AssembledSystem(op, load, u[op.fixed])


def solve(system):
    op = system.operator
    u = np.zeros(op.mesh.n_vertices, dtype=complex)
    u[op.fixed] = system.fixed_values
    u[op.free] = op.solve_free(system.load)
    return u


def solve_state(problem):
    return problem.operator.field(problem.g, problem.f)


def solve_adjoint(problem, source):
    """Solve ``K p = source`` on the free vertices with homogeneous boundary data.

    ``source`` is either a free-vertex vector or a full-length vector (its
    fixed entries are ignored). ``K`` is symmetric, so this is also the
    transposed solve.
    """
    op = problem.operator
    s = np.asarray(source, dtype=complex)
    if len(s) == problem.mesh.n_vertices:
        s = s[op.free]
    return op.field(free_rhs=s)


def solve_variation(problem, w):
    """Field driven only by outer data ``w`` (zero inner data)."""
    return problem.operator.field(None, _boundary_values(problem.mesh, problem.operator.outer, w))


# ------------------------------------------------------------------ export


def write_field_csv(mesh, u, path):
    """``vertex_index,x,y,re,im`` per vertex."""
    u = np.asarray(u, dtype=complex)
    tmp = str(path) + ".partial"
    with open(tmp, "w") as fh:
        fh.write("vertex_index,x,y,re,im\n")
        for i, ((x, y), val) in enumerate(zip(mesh.vertices.tolist(), u.tolist())):
            fh.write(f"{i},{x!r},{y!r},{val.real!r},{val.imag!r}\n")
    os.replace(tmp, path)


def write_field_vtk(mesh, u, path, name="u"):
    """Legacy ASCII VTK unstructured grid with ``re``/``im``/``abs`` point data."""
    u = np.asarray(u, dtype=complex)
    nv, nt = mesh.n_vertices, mesh.n_triangles
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"{name}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {nv} double\n")
        np.savetxt(fh, np.column_stack([mesh.vertices, np.zeros(nv)]), fmt="%.17g")
        fh.write(f"CELLS {nt} {4 * nt}\n")
        np.savetxt(fh, np.column_stack([np.full(nt, 3), mesh.triangles]), fmt="%d")
        fh.write(f"CELL_TYPES {nt}\n")
        np.savetxt(fh, np.full(nt, 5), fmt="%d")
        fh.write(f"POINT_DATA {nv}\n")
        for label, data in (("re", u.real), ("im", u.imag), ("abs", np.abs(u))):
            fh.write(f"SCALARS {name}_{label} double 1\nLOOKUP_TABLE default\n")
            np.savetxt(fh, data, fmt="%.17g")
