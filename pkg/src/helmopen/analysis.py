"""Error norms, convergence studies and the guided-mode divergence scan."""

import csv
import math
import os
import time
from dataclasses import dataclass, field, fields

import numpy as np

from .cgm import CgmConfig, minimize
from .errors import ZeroReference
from .exact import ModeSolution
from .fem import _CACHE as _FEM_CACHE
from .fem import HelmholtzProblem, OuterKind
from .functional import _Q_CACHE, FunctionalConfig
from .geometry import QUAD_BARY, DomainSpec, Region, Shape, build_mesh, region_mask, restrict_to_radius
from .refraction import AngularLinear, Constant

__all__ = [
    "ErrorReport",
    "StudyRow",
    "MeshPolicy",
    "ScanCurve",
    "error_norms",
    "convergence_study",
    "divergence_scan",
    "write_study_csv",
    "write_curves",
    "write_scan_csv",
    "write_timings",
    "release",
]


def _num(x):
    """Round-trippable decimal text for a real number."""
    return repr(float(x))


@dataclass(frozen=True)
class ErrorReport:
    L2: float
    L2_rel: float
    H1: float
    H1_rel: float
    dJ_rel: float
    region: Region = Region.FULL


@dataclass(frozen=True)
class StudyRow:
    j: int
    k: float
    R: float
    shape: str
    refraction: str
    unit: ErrorReport
    full: ErrorReport
    iterations: int
    converged: bool
    wall_time: float
    J: float = math.nan
    run: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class MeshPolicy:
    """Far-field edge length ``h`` and node spacing ``inner_h`` on the hole."""

    h: float = 0.1
    inner_h: float = 0.02

    def build(self, spec):
        return build_mesh(spec, self.h, inner_h=self.inner_h)


# ------------------------------------------------------------------ norms


def _quad_fields(u, mesh):
    """Values ``(T, 7)`` and gradients ``(T, 7, 2)`` of a P1 field at quadrature points."""
    ut = np.asarray(u, dtype=complex)[mesh.triangles]
    grad = np.einsum("tad,ta->td", mesh.basis_gradients, ut)
    return ut @ QUAD_BARY.T, np.broadcast_to(grad[:, None, :], mesh.quad_points.shape)


def _reference_fields(ref, mesh):
    if hasattr(ref, "values_and_gradients"):
        return ref.values_and_gradients(mesh.quad_points)
    return _quad_fields(ref, mesh)


def _functional(vals, grads, mesh, k, refraction, weights):
    xhat = mesh.quad_points / np.linalg.norm(mesh.quad_points, axis=-1, keepdims=True)
    n = refraction(mesh.quad_points)
    res = grads - 1j * k * (n * vals)[..., None] * xhat
    return float(np.sum(weights * np.sum(np.abs(res) ** 2, axis=-1)))


def error_norms(u_num, u_ref, mesh, mask=None, k=1.0, refraction=None, functional=FunctionalConfig()):
    """L2, H1 and relative functional errors of ``u_num`` against ``u_ref``.

    ``u_ref`` is a nodal field on the same mesh or an oracle with a
    ``values_and_gradients`` method, which is then sampled at the
    quadrature points. ``mask`` restricts every integral to a region.
    """
    refraction = Constant(1.0) if refraction is None else refraction
    w = mesh.quad_weights
    region = Region.FULL
    if mask is not None:
        w = w * mask.element_weights[:, None]
        region = mask.region
    uv, ug = _quad_fields(u_num, mesh)
    rv, rg = _reference_fields(u_ref, mesh)
    ev, eg = uv - rv, ug - rg
    e0 = np.sum(w * np.abs(ev) ** 2)
    e1 = np.sum(w * np.sum(np.abs(eg) ** 2, axis=-1))
    r0 = np.sum(w * np.abs(rv) ** 2)
    r1 = np.sum(w * np.sum(np.abs(rg) ** 2, axis=-1))
    if r0 == 0.0:
        raise ZeroReference("reference field has zero norm on the region")
    jw = w / (1.0 + np.linalg.norm(mesh.quad_points, axis=-1)) if functional.weighted else w
    j_ref = _functional(rv, rg, mesh, k, refraction, jw)
    if j_ref == 0.0:
        raise ZeroReference("reference field has a zero functional value")
    j_err = _functional(ev, eg, mesh, k, refraction, jw)
    L2, H1 = math.sqrt(e0), math.sqrt(e0 + e1)
    return ErrorReport(L2, L2 / math.sqrt(r0), H1, H1 / math.sqrt(r0 + r1), j_err / j_ref, region)


# ---------------------------------------------------------------- studies


def _solve_row(mesh, j, k, refraction, functional, cgm, outer_kind):
    problem = HelmholtzProblem(mesh, k, refraction, _cos_mode(j), outer_kind)
    t = time.perf_counter()
    run = minimize(problem, functional, cgm)
    return run, time.perf_counter() - t


def release(mesh):
    """Drop the factorizations and functional matrices cached for ``mesh``."""
    _FEM_CACHE.pop(mesh, None)
    _Q_CACHE.pop(mesh, None)


def _cos_mode(j):
    def g(points):
        return np.cos(j * np.arctan2(points[:, 1], points[:, 0]))

    return g


def convergence_study(
    shapes=("annulus",),
    j_values=(0,),
    k_values=(1.0,),
    R_values=(1.0, 2.0, 4.0, 8.0),
    refraction=None,
    policy=MeshPolicy(),
    functional=None,
    cgm=CgmConfig(),
    outer_kind=OuterKind.NEUMANN,
    r_hat=0.5,
    R_ref=8.0,
    progress=None,
):
    """Run the minimization for every combination and measure the errors.

    With a constant index the reference is the exact mode solution. With a
    variable index (annulus only) the reference is the minimizer on the
    ``R_ref`` annulus; smaller meshes are exact prefixes of its mesh, so
    the reference restricts by slicing. Rows come back sorted by
    ``(shape, j, k, R)``.
    """
    refraction = Constant(1.0) if refraction is None else refraction
    if functional is None:
        functional = FunctionalConfig(weighted=not refraction.is_constant)
    rows = []
    for shape in shapes:
        shape = Shape(shape)
        if refraction.is_constant:
            rows += _exact_rows(shape, j_values, k_values, R_values, refraction, policy, functional, cgm, outer_kind, r_hat, progress)
        else:
            if shape is not Shape.ANNULUS:
                raise ValueError("variable-index studies need nested annulus meshes")
            rows += _self_ref_rows(j_values, k_values, R_values, refraction, policy, functional, cgm, outer_kind, r_hat, R_ref, progress)
    rows.sort(key=lambda r: (r.shape, r.j, r.k, r.R))
    return rows


def _exact_rows(shape, j_values, k_values, R_values, refraction, policy, functional, cgm, outer_kind, r_hat, progress):
    rows = []
    for R in R_values:
        mesh = policy.build(DomainSpec(shape, r_hat, float(R)))
        unit = region_mask(mesh, Region.ANNULUS_UNIT)
        for j in j_values:
            for k in k_values:
                run, wall = _solve_row(mesh, j, k, refraction, functional, cgm, outer_kind)
                exact = ModeSolution(j, k, r_hat)
                ctx = dict(k=k, refraction=refraction, functional=functional)
                row = StudyRow(
                    j, k, float(R), shape.value, refraction.tag(),
                    error_norms(run.u_star, exact, mesh, unit, **ctx),
                    error_norms(run.u_star, exact, mesh, None, **ctx),
                    run.iterations, run.converged, wall, run.J, run,
                )
                rows.append(row)
                if progress:
                    progress(row)
        release(mesh)
    return rows


def _self_ref_rows(j_values, k_values, R_values, refraction, policy, functional, cgm, outer_kind, r_hat, R_ref, progress):
    rows = []
    big = policy.build(DomainSpec(Shape.ANNULUS, r_hat, float(R_ref)))
    radii = sorted({float(R) for R in R_values if R <= R_ref} | {float(R_ref)})
    meshes = {R: (big if R == R_ref else restrict_to_radius(big, R)) for R in radii}
    for j in j_values:
        for k in k_values:
            ref_run, ref_wall = _solve_row(big, j, k, refraction, functional, cgm, outer_kind)
            for R in radii:
                mesh = meshes[R]
                if R == R_ref:
                    run, wall = ref_run, ref_wall
                else:
                    run, wall = _solve_row(mesh, j, k, refraction, functional, cgm, outer_kind)
                ref = ref_run.u_star[: mesh.n_vertices]
                ctx = dict(k=k, refraction=refraction, functional=functional)
                unit = region_mask(mesh, Region.ANNULUS_UNIT)
                row = StudyRow(
                    j, k, R, Shape.ANNULUS.value, refraction.tag(),
                    error_norms(run.u_star, ref, mesh, unit, **ctx),
                    error_norms(run.u_star, ref, mesh, None, **ctx),
                    run.iterations, run.converged, wall, run.J, run,
                )
                rows.append(row)
                if progress:
                    progress(row)
    for mesh in meshes.values():
        release(mesh)
    return rows


# ------------------------------------------------------------------ scan


@dataclass(frozen=True)
class ScanCurve:
    a: float
    R: tuple
    J: tuple
    bounded: bool
    growth: float = field(default=math.nan)


def classify(J_values, threshold=0.05):
    """Relative growth over the last interval and whether it is below ``threshold``."""
    growth = (J_values[-1] - J_values[-2]) / J_values[-2]
    return growth, bool(growth < threshold)


def divergence_scan(a_values=(0.0, 0.1, 0.8), R_values=(2.0, 4.0, 8.0, 12.0), k=1.0, j=0, policy=MeshPolicy(), cgm=CgmConfig(), r_hat=0.5, progress=None):
    """Weighted ``J(u_star)`` against ``R`` for the angular index ``2 + a cos(theta)``.

    All radii share one nested annulus mesh. A curve is bounded when its
    last-interval relative growth is below 5%.
    """
    R_values = sorted(float(R) for R in R_values)
    big = policy.build(DomainSpec(Shape.ANNULUS, r_hat, R_values[-1]))
    meshes = [big if R == R_values[-1] else restrict_to_radius(big, R) for R in R_values]
    functional = FunctionalConfig(weighted=True)
    curves = []
    for a in a_values:
        model = AngularLinear(float(a))
        J = []
        for mesh in meshes:
            run, _ = _solve_row(mesh, j, k, model, functional, cgm, OuterKind.NEUMANN)
            J.append(run.J)
            if progress:
                progress(a, mesh.domain.outer_size, run)
        growth, bounded = classify(J)
        curves.append(ScanCurve(float(a), tuple(R_values), tuple(J), bounded, growth))
    for mesh in meshes:
        release(mesh)
    return curves


# ------------------------------------------------------------------ output

_REPORT_FIELDS = [f.name for f in fields(ErrorReport) if f.name != "region"]


def _atomic_csv(path, header, rows):
    tmp = str(path) + ".partial"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    os.replace(tmp, path)


def write_study_csv(rows, path):
    """One line per row; written to ``path.partial`` and renamed when complete."""
    header = ["shape", "j", "k", "R", "refraction"]
    header += [f"unit_{n}" for n in _REPORT_FIELDS] + [f"full_{n}" for n in _REPORT_FIELDS]
    header += ["iterations", "converged", "J"]
    body = []
    for r in rows:
        line = [r.shape, r.j, _num(r.k), _num(r.R), r.refraction]
        line += [_num(getattr(r.unit, n)) for n in _REPORT_FIELDS]
        line += [_num(getattr(r.full, n)) for n in _REPORT_FIELDS]
        line += [r.iterations, int(r.converged), _num(r.J)]
        body.append(line)
    _atomic_csv(path, header, body)


def write_timings(rows, path):
    """Wall-clock seconds per row, kept apart so ``study.csv`` is reproducible."""
    body = [[r.shape, r.j, _num(r.k), _num(r.R), f"{r.wall_time:.3f}"] for r in rows]
    _atomic_csv(path, ["shape", "j", "k", "R", "wall_time"], body)


def write_curves(rows, directory, column="L2_rel"):
    """Two-column ``R value`` files, one per ``(shape, j, k)``, for plotting."""
    os.makedirs(directory, exist_ok=True)
    groups = {}
    for r in rows:
        groups.setdefault((r.shape, r.j, r.k), []).append(r)
    paths = []
    for (shape, j, k), group in sorted(groups.items()):
        path = os.path.join(directory, f"{shape}_j{j}_k{k:g}_{column}.dat")
        with open(path, "w") as fh:
            fh.write(f"# R {column} on the unit annulus\n")
            for r in sorted(group, key=lambda r: r.R):
                fh.write(f"{r.R:g} {getattr(r.unit, column)!r}\n")
        paths.append(path)
    return paths


def write_scan_csv(curves, path):
    body = []
    for c in curves:
        for R, J in zip(c.R, c.J):
            body.append([_num(c.a), _num(R), _num(J), "bounded" if c.bounded else "growing"])
    _atomic_csv(path, ["a", "R", "J", "classification"], body)
