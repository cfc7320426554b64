"""Weighted functional of the minimizer against R for n = 2 + a cos(theta).

For small a the curve levels off; for a = 0.8 it keeps growing, which is
the signature of guided modes travelling along the x axis. A coarse mesh
inflates the growth of every curve, so the default policy is used here
(a few minutes on one core).
"""

from helmopen import MeshPolicy, divergence_scan

curves = divergence_scan((0.0, 0.1, 0.4, 0.8), (2.0, 4.0, 8.0, 12.0), policy=MeshPolicy())
for c in curves:
    Js = "  ".join(f"{J:8.4f}" for J in c.J)
    print(f"a={c.a:3g}  J(R)= {Js}  last growth {c.growth:6.3f}  {'bounded' if c.bounded else 'growing'}")
