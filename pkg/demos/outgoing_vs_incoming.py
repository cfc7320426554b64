"""How the functional tells outgoing from incoming waves.

The interpolated outgoing mode H0(kr)/H0(k r_hat) has a small Sommerfeld
residual; its complex conjugate (an incoming wave) is penalized with the
full 2ik u. The imaginary flux through circles is the same for every
radius, 4 / |H0(k r_hat)|^2.
"""

import numpy as np

from helmopen import DomainSpec, ModeSolution, MeshPolicy, eval_J, imaginary_flux, outgoing_flux

k, r_hat = 1.0, 0.5
for R in (4.0, 8.0):
    mesh = MeshPolicy().build(DomainSpec("annulus", r_hat, R))
    u = ModeSolution(0, k, r_hat)(mesh.vertices)
    J_out = eval_J(u, mesh, k).J
    J_in = eval_J(u.conj(), mesh, k).J
    grad2 = eval_J(u, mesh, 0.0).J
    print(f"R={R:g}: J_out={J_out:.4f}  J_out/|grad u|^2={J_out / grad2:.4f}  J_in/J_out={J_in / J_out:.1f}")

print(f"flux target 4/|H0|^2 = {outgoing_flux(k, r_hat):.6f}")
for rho in (0.75, 1.5, 3.0, 6.0):
    print(f"  rho={rho:4g}: {imaginary_flux(u, mesh, rho):.6f}")
