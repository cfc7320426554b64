"""Exterior Helmholtz problems on truncated domains.

The outer boundary data of a P1 finite element model is chosen to minimize
a radiation functional, so no absorbing condition or PML is needed.
"""

from .analysis import ErrorReport, MeshPolicy, StudyRow, convergence_study, divergence_scan, error_norms
from .cgm import CgmConfig, CgmRun, minimize, minimized_seminorm, reduced_gradient
from .exact import ModeSolution, exact_mode, outgoing_flux, series_solution
from .fem import HelmholtzProblem, OuterKind, assemble, solve, solve_adjoint, solve_state
from .functional import FunctionalConfig, eval_J, imaginary_flux, seminorm_bound_check
from .geometry import DomainSpec, Region, Shape, TriMesh, build_mesh, mesh_quality, refine_uniform, region_mask, restrict_to_radius
from .refraction import AngularLinear, Constant, GaussianPair, check_admissibility, parse_refraction

__version__ = "0.1.0"
