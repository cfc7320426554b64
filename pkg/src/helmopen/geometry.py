"""Structured triangle meshes for the three computational domains.

All domains are meshed ring by ring in a reference polar coordinate
``(rho, theta)``. Rings keep roughly square cells: near the hole the radial
step follows the angular spacing (geometric grading), further out it
saturates at the target size and the number of nodes per ring doubles
through a transition layer whenever the angular spacing grows too large.

For the annulus the map to physical space is the identity, so meshes built
with the same sizing share their ring layout on common subdomains: the mesh
of ``B_R minus B_r`` is an exact prefix (vertices and triangles) of the mesh
of any larger annulus that has ``R`` among its milestone radii.

Ellipse and square domains keep the polar core up to a transition radius
``r_t`` and then blend along rays to the outer curve,

    x(rho, theta) = rho * sigma(theta) ** b(rho) * e(theta),
    b = log(rho / r_t) / log(R_ref / r_t),  sigma = r_out(theta) / R_ref,

where ``R_ref`` is the geometric mean of ``r_out``. The blend is homothetic
in ``log rho`` so cells keep their aspect ratio, and it is well defined
because both outer curves are star shaped about the origin.
"""

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidDomain, MeshQualityFailure, RegionOutsideDomain

__all__ = [
    "Shape",
    "Region",
    "DomainSpec",
    "TriMesh",
    "RegionMask",
    "MeshQuality",
    "build_mesh",
    "refine_uniform",
    "region_mask",
    "mesh_quality",
    "restrict_to_radius",
    "write_mesh",
    "read_mesh",
    "INNER",
    "OUTER",
]

INNER = 0
OUTER = 1
_TAG_NAMES = {INNER: "inner", OUTER: "outer"}

MILESTONES = (1.0, 2.0, 4.0, 8.0, 12.0, 16.0, 32.0)

# 7-point degree-5 rule on the reference triangle (barycentric, weights sum 1)
_A1, _B1 = 0.059715871789770, 0.470142064105115
_A2, _B2 = 0.797426985353087, 0.101286507323456
_W0, _W1, _W2 = 0.225, 0.132394152788506, 0.125939180544827
QUAD_BARY = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3],
        [_A1, _B1, _B1],
        [_B1, _A1, _B1],
        [_B1, _B1, _A1],
        [_A2, _B2, _B2],
        [_B2, _A2, _B2],
        [_B2, _B2, _A2],
    ]
)
QUAD_WEIGHTS = np.array([_W0, _W1, _W1, _W1, _W2, _W2, _W2])


class Shape(str, enum.Enum):
    ANNULUS = "annulus"
    ELLIPSE_HOLE = "ellipse"
    SQUARE_HOLE = "square"


class Region(str, enum.Enum):
    FULL = "full"
    ANNULUS_UNIT = "annulus_unit"


@dataclass(frozen=True)
class DomainSpec:
    """Outer shape with a centred circular hole of radius ``r_inner``.

    ``outer_size`` is the outer radius (annulus), the semi-minor axis of an
    ellipse with semi-major axis ``2 * outer_size``, or the half side length
    of the square.
    """

    shape: Shape
    r_inner: float
    outer_size: float

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        if not self.r_inner > 0:
            raise InvalidDomain("r_inner must be positive")
        if not self.r_inner < self.outer_size:
            raise InvalidDomain("the hole must lie strictly inside the outer curve")

    @property
    def inradius(self):
        """Radius of the largest centred disk inside the outer curve."""
        return self.outer_size

    def outer_radius(self, theta):
        """Distance from the origin to the outer curve along direction theta."""
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        R = self.outer_size
        if self.shape is Shape.ANNULUS:
            return np.full_like(theta, R)
        if self.shape is Shape.ELLIPSE_HOLE:
            return 1.0 / np.sqrt((c / (2 * R)) ** 2 + (s / R) ** 2)
        return R / np.maximum(np.abs(c), np.abs(s))

    def project_outer(self, points):
        pts = np.asarray(points, dtype=float)
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        r = self.outer_radius(theta)
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    def project_inner(self, points):
        pts = np.asarray(points, dtype=float)
        r = np.hypot(pts[:, 0], pts[:, 1])
        return pts * (self.r_inner / r)[:, None]


@dataclass(eq=False)
class TriMesh:
    """Conforming P1 triangle mesh of ``Omega minus B_{r_inner}``.

    ``boundary_edges`` is an ``(P, 2)`` vertex-index array and
    ``boundary_tags`` holds ``INNER`` or ``OUTER`` per edge. ``rings`` keeps
    the ``(rho, n_theta)`` layout the mesh was generated from, or ``None``
    for refined and externally read meshes.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    domain: DomainSpec = None
    rings: list = field(default=None, repr=False)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        self.boundary_edges = np.asarray(self.boundary_edges, dtype=np.int64).reshape(-1, 2)
        self.boundary_tags = np.asarray(self.boundary_tags, dtype=np.int64)
        self.vertices.flags.writeable = False
        self.triangles.flags.writeable = False

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def boundary_vertices(self, tag):
        """Sorted unique vertex indices on the boundary loop with ``tag``."""
        return np.unique(self.boundary_edges[self.boundary_tags == tag])

    def edges_with_tag(self, tag):
        return self.boundary_edges[self.boundary_tags == tag]

    @cached_property
    def areas(self):
        p = self.vertices[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def basis_gradients(self):
        """``(T, 3, 2)`` constant gradients of the barycentric hat functions."""
        p = self.vertices[self.triangles]
        x, y = p[..., 0], p[..., 1]
        two_a = 2.0 * self.areas
        gx = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
        gy = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
        return np.stack([gx, gy], axis=-1) / two_a[:, None, None]

    @cached_property
    def quad_points(self):
        """``(T, 7, 2)`` physical coordinates of the 7-point rule."""
        return np.einsum("qa,tad->tqd", QUAD_BARY, self.vertices[self.triangles])

    @cached_property
    def quad_weights(self):
        """``(T, 7)`` quadrature weights including the element area."""
        return self.areas[:, None] * QUAD_WEIGHTS[None, :]

    @cached_property
    def edges(self):
        """Unique undirected edges and, per edge, the number of adjacent triangles."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        uniq, counts = np.unique(e, axis=0, return_counts=True)
        return uniq, counts

    def evaluate(self, u, points):
        """Interpolate the nodal field ``u`` and its gradient at ``points``.

        Returns ``(values, gradients, element_index)``; raises ``ValueError``
        when a point lies outside the mesh.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        elem, bary = self.locate(pts)
        if np.any(elem < 0):
            raise ValueError("point outside the mesh")
        u = np.asarray(u)
        vals = np.einsum("pa,pa->p", bary, u[self.triangles[elem]])
        grads = np.einsum("pad,pa->pd", self.basis_gradients[elem], u[self.triangles[elem]])
        return vals, grads, elem

    def locate(self, points, k_nearest=12):
        """Element containing each point (``-1`` if none) and barycentrics."""
        from scipy.spatial import cKDTree

        pts = np.atleast_2d(np.asarray(points, dtype=float))
        tree = self._centroid_tree
        k = min(k_nearest, self.n_triangles)
        _, cand = tree.query(pts, k=k)
        cand = cand.reshape(len(pts), k)
        elem = np.full(len(pts), -1, dtype=np.int64)
        bary = np.zeros((len(pts), 3))
        best = np.full(len(pts), -np.inf)
        for c in range(k):
            b = self._barycentric(cand[:, c], pts)
            score = b.min(axis=1)
            better = score > best
            best[better] = score[better]
            elem[better] = cand[better, c]
            bary[better] = b[better]
        miss = best < -1e-9
        for i in np.nonzero(miss)[0]:
            b = self._barycentric(np.arange(self.n_triangles), np.repeat(pts[i : i + 1], self.n_triangles, 0))
            score = b.min(axis=1)
            e = int(np.argmax(score))
            if score[e] >= -1e-9:
                elem[i], bary[i], best[i] = e, b[e], score[e]
            else:
                elem[i] = -1
        return elem, bary

    @cached_property
    def _centroid_tree(self):
        from scipy.spatial import cKDTree

        return cKDTree(self.vertices[self.triangles].mean(axis=1))

    def _barycentric(self, elems, pts):
        g = self.basis_gradients[elems]
        v0 = self.vertices[self.triangles[elems, 0]]
        d = pts - v0
        l1 = np.einsum("pd,pd->p", g[:, 1], d)
        l2 = np.einsum("pd,pd->p", g[:, 2], d)
        return np.column_stack([1.0 - l1 - l2, l1, l2])


@dataclass(frozen=True)
class RegionMask:
    """Per-triangle fraction of the element that belongs to a region."""

    element_weights: np.ndarray
    region: Region = Region.FULL


@dataclass(frozen=True)
class MeshQuality:
    min_angle: float
    max_edge: float
    triangle_count: int


# ---------------------------------------------------------------- layout


def _segment_radii(a, b, size):
    """Radii strictly after ``a`` up to and including ``b``.

    ``size(rho)`` is the desired radial spacing; the number of steps is the
    integral of its reciprocal rounded up and the radii equidistribute that
    integral.
    """
    grid = np.geomspace(a, b, 4097)
    inv = 1.0 / size(grid)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (inv[1:] + inv[:-1]) * np.diff(grid))])
    m = max(1, int(np.ceil(cum[-1] * (1.0 - 1e-9))))
    radii = np.interp(cum[-1] * np.arange(1, m) / m, cum, grid)
    return [float(r) for r in radii] + [float(b)]


def _ring_layout(r_hat, rho_max, size, h_max, milestones, spacing):
    """List of ``(rho, n_theta)`` rings from ``r_hat`` outward.

    ``size(rho)`` is the desired radial step and ``spacing(rho, n)`` the
    largest physical distance between consecutive nodes of a ring with ``n``
    nodes; a ring doubles its node count when that distance would exceed
    ``1.1 * h_max``.
    """
    n0 = 8 * int(np.ceil(2 * np.pi * r_hat / (8 * size(np.array([r_hat]))[0])))
    marks = sorted({m for m in milestones if r_hat < m < rho_max} | {rho_max})
    rings = [(r_hat, n0)]
    a = r_hat
    for b in marks:
        for rho in _segment_radii(a, b, size):
            n = rings[-1][1]
            if spacing(rho, n) > 1.1 * h_max:
                n *= 2
            rings.append((rho, n))
        a = b
    return rings


def _assemble_rings(rings, position):
    """Vertices and triangles for consecutive rings (doubling allowed)."""
    verts, offsets = [], []
    off = 0
    for rho, n in rings:
        theta = 2 * np.pi * np.arange(n) / n
        verts.append(position(rho, theta))
        offsets.append(off)
        off += n
    vv = np.vstack(verts)
    tris = []
    for i in range(len(rings) - 1):
        n_in, n_out = rings[i][1], rings[i + 1][1]
        a0, b0 = offsets[i], offsets[i + 1]
        k = np.arange(n_in)
        kp = (k + 1) % n_in
        if n_out == n_in:
            a, ap, A, Ap = a0 + k, a0 + kp, b0 + k, b0 + kp
            # split each quad along its shorter diagonal
            d1 = np.linalg.norm(vv[a] - vv[Ap], axis=1)
            d2 = np.linalg.norm(vv[ap] - vv[A], axis=1)
            use1 = d1 <= d2 * (1 + 1e-9)
            tris.append(np.column_stack([a, ap, Ap])[use1])
            tris.append(np.column_stack([a, Ap, A])[use1])
            tris.append(np.column_stack([a, ap, A])[~use1])
            tris.append(np.column_stack([ap, Ap, A])[~use1])
        elif n_out == 2 * n_in:
            A = b0 + 2 * k
            M = b0 + 2 * k + 1
            Ap = b0 + (2 * k + 2) % n_out
            tris.append(np.column_stack([a0 + k, a0 + kp, M]))
            tris.append(np.column_stack([a0 + k, M, A]))
            tris.append(np.column_stack([a0 + kp, Ap, M]))
        else:
            raise MeshQualityFailure("ring layout may only double between rings")
    return vv, np.vstack(tris), offsets


def _ring_boundary(offset, n, reverse=False):
    k = np.arange(n)
    e = np.column_stack([offset + k, offset + (k + 1) % n])
    return e[:, ::-1] if reverse else e


def build_mesh(spec, target_h, inner_h=None, milestones=MILESTONES, smooth=3):
    """Mesh ``spec`` with maximum edge length about ``target_h``.

    ``inner_h`` is the node spacing on the hole (defaults to ``target_h``);
    cells grow geometrically away from the hole until they reach
    ``target_h``. Raises :class:`MeshQualityFailure` if the generated mesh
    has an angle below 20 degrees or an edge longer than ``1.5 * target_h``.
    """
    if not isinstance(spec, DomainSpec):
        raise InvalidDomain("spec must be a DomainSpec")
    if not 0 < target_h < (spec.outer_size - spec.r_inner):
        raise InvalidDomain("target_h must be positive and smaller than the domain width")
    inner_h = target_h if inner_h is None else min(inner_h, target_h)
    r_hat, R = spec.r_inner, spec.outer_size

    if spec.shape is Shape.ANNULUS:
        position = _polar_position
        r_t = R_ref = R
        stretch = lambda rho: np.ones_like(rho)
    else:
        r_t = 1.0 if spec.inradius >= 1.5 else r_hat
        theta_s = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
        log_sigma = np.log(spec.outer_radius(theta_s))
        R_ref = float(np.exp(log_sigma.mean()))
        log_sigma -= np.log(R_ref)
        position = _blend_position(spec, r_t, R_ref)

        def stretch(rho):
            # largest radial stretch d r / d rho over all directions
            rho = np.asarray(rho, dtype=float)
            L = np.log(R_ref / r_t)
            b = np.clip(np.log(np.maximum(rho, r_t) / r_t) / L, 0.0, 1.0)
            db = np.where(rho > r_t, 1.0 / L, 0.0)
            st = np.exp(np.outer(b, log_sigma)) * (1.0 + np.outer(db, log_sigma))
            return st.max(axis=1)

    # sheared blend cells have longer diagonals than the polar ones
    h_eff = target_h if spec.shape is Shape.ANNULUS else 0.92 * target_h

    def size(rho):
        return np.minimum(h_eff / stretch(rho), inner_h * rho / r_hat)

    def spacing(rho, n):
        th = 2 * np.pi * np.arange(n + 1) / n
        p = position(rho, th)
        return float(np.max(np.hypot(*np.diff(p, axis=0).T)))

    marks = tuple(milestones) if spec.shape is Shape.ANNULUS else (r_t,)
    rings = _ring_layout(r_hat, R_ref, size, h_eff, marks, spacing)
    blend_from = None if spec.shape is Shape.ANNULUS else next(i for i, (rho, _) in enumerate(rings) if rho > r_t)

    verts, tris, offsets = _assemble_rings(rings, position)
    n_out = rings[-1][1]
    edges = np.vstack([_ring_boundary(0, rings[0][1], reverse=True), _ring_boundary(offsets[-1], n_out)])
    tags = np.concatenate([np.full(rings[0][1], INNER), np.full(n_out, OUTER)])
    tris = _orient(verts, tris)
    if blend_from is not None and smooth:
        verts = _smooth_blend(verts, tris, offsets[blend_from], offsets[-1], smooth)
    mesh = TriMesh(verts, tris, edges, tags, spec, rings)
    q = mesh_quality(mesh)
    if q.min_angle < 20.0:
        raise MeshQualityFailure(f"minimum angle {q.min_angle:.2f} deg below 20 deg")
    if q.max_edge > 1.5 * target_h:
        raise MeshQualityFailure(f"maximum edge {q.max_edge:.4g} exceeds 1.5 h = {1.5 * target_h:.4g}")
    return mesh


def _polar_position(rho, theta):
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])


def _blend_position(spec, r_t, R_ref):
    """Identity inside ``r_t``; beyond, ``r = rho * sigma(theta) ** b(rho)``
    with ``sigma = r_out / R_ref`` and ``b`` growing like ``log(rho)``
    from 0 at ``r_t`` to 1 at ``R_ref``."""
    L = np.log(R_ref / r_t)

    def position(rho, theta):
        theta = np.asarray(theta, dtype=float)
        if rho <= r_t:
            r = np.full_like(theta, rho)
        elif rho >= R_ref:
            r = spec.outer_radius(theta)
        else:
            b = np.log(rho / r_t) / L
            r = rho * (spec.outer_radius(theta) / R_ref) ** b
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    return position


def _orient(verts, tris):
    p = verts[tris]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    neg = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] < 0
    tris = tris.copy()
    tris[neg] = tris[neg][:, [0, 2, 1]]
    return tris


def _smooth_blend(verts, tris, first, last, iterations):
    """Laplacian smoothing of blend-zone interior vertices, kept only if the
    minimum angle does not decrease."""
    movable = np.zeros(len(verts), dtype=bool)
    movable[first:last] = True
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    deg = np.bincount(e.ravel(), minlength=len(verts)).astype(float)
    before = _min_angle(verts, tris)
    v = verts.copy()
    for _ in range(iterations):
        acc = np.zeros_like(v)
        np.add.at(acc, e[:, 0], v[e[:, 1]])
        np.add.at(acc, e[:, 1], v[e[:, 0]])
        avg = acc / deg[:, None]
        v[movable] = avg[movable]
    if _min_angle(v, tris) >= before and _all_positive(v, tris):
        return v
    return verts


def _all_positive(verts, tris):
    p = verts[tris]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    return bool(np.all(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] > 0))


def _angles(verts, tris):
    p = verts[tris]
    out = []
    for i in range(3):
        a = p[:, (i + 1) % 3] - p[:, i]
        b = p[:, (i + 2) % 3] - p[:, i]
        cosang = np.einsum("td,td->t", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
        out.append(np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0))))
    return np.column_stack(out)


def _min_angle(verts, tris):
    return float(_angles(verts, tris).min())


def mesh_quality(mesh):
    """Minimum interior angle (degrees), longest edge and triangle count."""
    edges, _ = mesh.edges
    lengths = np.linalg.norm(mesh.vertices[edges[:, 0]] - mesh.vertices[edges[:, 1]], axis=1)
    return MeshQuality(_min_angle(mesh.vertices, mesh.triangles), float(lengths.max()), mesh.n_triangles)


# ------------------------------------------------------------ refinement


def refine_uniform(mesh):
    """Split every triangle into four through its edge midpoints.

    Midpoints of boundary edges are projected back onto the exact inner
    circle or outer curve; boundary tags are inherited.
    """
    edges, _ = mesh.edges
    nv = mesh.n_vertices
    key = edges[:, 0] * nv + edges[:, 1]
    order = np.argsort(key)
    key_sorted = key[order]

    def mid_index(a, b):
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        pos = np.searchsorted(key_sorted, lo * nv + hi)
        return nv + order[pos]

    mids = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    verts = np.vstack([mesh.vertices, mids])
    t = mesh.triangles
    m01, m12, m20 = mid_index(t[:, 0], t[:, 1]), mid_index(t[:, 1], t[:, 2]), mid_index(t[:, 2], t[:, 0])
    tris = np.vstack(
        [
            np.column_stack([t[:, 0], m01, m20]),
            np.column_stack([m01, t[:, 1], m12]),
            np.column_stack([m20, m12, t[:, 2]]),
            np.column_stack([m01, m12, m20]),
        ]
    )
    be = mesh.boundary_edges
    bm = mid_index(be[:, 0], be[:, 1])
    new_edges = np.vstack([np.column_stack([be[:, 0], bm]), np.column_stack([bm, be[:, 1]])])
    new_tags = np.concatenate([mesh.boundary_tags, mesh.boundary_tags])
    if mesh.domain is not None:
        inner = bm[mesh.boundary_tags == INNER]
        outer = bm[mesh.boundary_tags == OUTER]
        verts[inner] = mesh.domain.project_inner(verts[inner])
        verts[outer] = mesh.domain.project_outer(verts[outer])
    return TriMesh(verts, tris, new_edges, new_tags, mesh.domain, None)


def restrict_to_radius(mesh, radius):
    """Sub-mesh of a ring-structured annulus mesh inside ``|x| <= radius``.

    Because rings are generated outward, the restricted mesh is a prefix of
    ``mesh``: its vertices are ``mesh.vertices[:n]`` in the same order, so a
    nodal field restricts by slicing.
    """
    if mesh.rings is None or mesh.domain.shape is not Shape.ANNULUS:
        raise ValueError("restriction needs a ring-structured annulus mesh")
    radii = np.array([r for r, _ in mesh.rings])
    idx = np.nonzero(np.isclose(radii, radius, rtol=0, atol=1e-12))[0]
    if len(idx) == 0:
        raise ValueError(f"radius {radius} is not a ring of this mesh")
    i = int(idx[0])
    rings = mesh.rings[: i + 1]
    nv = sum(n for _, n in rings)
    keep = np.all(mesh.triangles < nv, axis=1)
    tris = mesh.triangles[keep]
    n_out = rings[-1][1]
    edges = np.vstack([_ring_boundary(0, rings[0][1], reverse=True), _ring_boundary(nv - n_out, n_out)])
    tags = np.concatenate([np.full(rings[0][1], INNER), np.full(n_out, OUTER)])
    spec = DomainSpec(Shape.ANNULUS, mesh.domain.r_inner, float(radius))
    return TriMesh(mesh.vertices[:nv], tris, edges, tags, spec, rings)


# --------------------------------------------------------------- regions


def region_mask(mesh, region):
    """Per-triangle weight of ``region``.

    For ``Region.ANNULUS_UNIT`` (the annulus between the hole and the unit
    circle) the weight is the fraction of the 7-point quadrature weight that
    falls inside ``|x| <= 1``.
    """
    region = Region(region)
    if region is Region.FULL:
        return RegionMask(np.ones(mesh.n_triangles), region)
    if mesh.domain is not None and mesh.domain.outer_size < 1.0:
        raise RegionOutsideDomain("the unit annulus is not contained in this domain")
    r = np.linalg.norm(mesh.quad_points, axis=-1)
    inside = r <= 1.0 + 1e-12
    return RegionMask(inside.astype(float) @ QUAD_WEIGHTS, region)


# ------------------------------------------------------------------ text IO


def write_mesh(mesh, path):
    """Write the ``helm-mesh v1`` text format."""
    with open(path, "w") as fh:
        fh.write("helm-mesh v1\n")
        fh.write(f"vertices {mesh.n_vertices}\n")
        for x, y in mesh.vertices.tolist():
            fh.write(f"{x!r} {y!r}\n")
        fh.write(f"triangles {mesh.n_triangles}\n")
        for i, j, k in mesh.triangles.tolist():
            fh.write(f"{i} {j} {k}\n")
        fh.write(f"boundary {len(mesh.boundary_edges)}\n")
        for (i, j), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
            fh.write(f"{i} {j} {_TAG_NAMES[int(tag)]}\n")


def read_mesh(path, domain=None):
    """Read a mesh written by :func:`write_mesh`."""
    with open(path) as fh:
        tokens = fh.read().split()
    if tokens[:2] != ["helm-mesh", "v1"]:
        raise ValueError("not a helm-mesh v1 file")
    pos = 2

    def section(name, width):
        nonlocal pos
        if tokens[pos] != name:
            raise ValueError(f"expected section {name!r}, got {tokens[pos]!r}")
        n = int(tokens[pos + 1])
        pos += 2
        chunk = tokens[pos : pos + n * width]
        pos += n * width
        return np.array(chunk, dtype=object).reshape(n, width)

    verts = section("vertices", 2).astype(float)
    tris = section("triangles", 3).astype(np.int64)
    bnd = section("boundary", 3)
    names = {v: k for k, v in _TAG_NAMES.items()}
    edges = bnd[:, :2].astype(np.int64)
    tags = np.array([names[t] for t in bnd[:, 2]], dtype=np.int64)
    return TriMesh(verts, tris, edges, tags, domain, None)
