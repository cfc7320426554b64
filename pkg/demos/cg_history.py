"""Convergence history of the conjugate gradient loop on the three shapes.

The annulus with g = cos(j theta) converges in a couple of steps because
the reduced problem decouples by angular mode. Ellipse and square mix
modes, and near-resonant Neumann modes make the square the slowest.
"""

import numpy as np

from helmopen import CgmConfig, DomainSpec, HelmholtzProblem, MeshPolicy, minimize

g = lambda p: np.cos(2 * np.arctan2(p[:, 1], p[:, 0]))
for shape in ("annulus", "ellipse", "square"):
    mesh = MeshPolicy(h=0.15, inner_h=0.04).build(DomainSpec(shape, 0.5, 2.0))
    run = minimize(HelmholtzProblem(mesh, 1.0, inner_data=g), config=CgmConfig(max_iterations=300))
    gammas = [s.gamma for s in run.history]
    marks = [m for m in (1, 5, 10, 20, 50, 100, 200) if m < len(gammas)]
    trail = "  ".join(f"m={m}:{gammas[m]:.1e}" for m in marks)
    print(f"{shape:8s} iterations={run.iterations:4d} converged={run.converged}  J={run.J:.6f}  {trail}")
