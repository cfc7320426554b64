"""Annulus study for g = 1, k = 1: errors on the unit annulus against R.

Run from the repository root:

    python3 demos/annulus_study.py

The minimizer of the radiation functional approaches the outgoing solution
as the outer radius grows. With R = 8 the relative L2 error on
B_1 minus B_1/2 is about 0.7%.
"""

from helmopen import MeshPolicy, convergence_study


def main():
    rows = convergence_study(("annulus",), (0,), (1.0,), (1.0, 2.0, 4.0, 8.0), policy=MeshPolicy())
    print(f"{'R':>4} {'vertices':>9} {'iters':>5} {'L2_rel':>10} {'H1_rel':>10} {'dJ_rel':>10}")
    for r in rows:
        nv = r.run.problem.mesh.n_vertices
        print(f"{r.R:4g} {nv:9d} {r.iterations:5d} {r.unit.L2_rel:10.4g} {r.unit.H1_rel:10.4g} {r.unit.dJ_rel:10.4g}")


if __name__ == "__main__":
    main()
