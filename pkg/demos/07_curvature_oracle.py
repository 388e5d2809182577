"""
Checking the curvature formula against generic Riemannian geometry
==================================================================

The action-angle metric diag(G, G^-1) is fed to textbook Christoffel and
Riemann code.  Its scalar curvature is a fixed multiple of the polytope
formula -1/2 d_a d_b G^ab, the same multiple for every potential.
"""

import numpy as np

from torickahler import abreu_scalar, calibrate, riemann_scalar_oracle, standard_potentials

pots = standard_potentials()
for name in ("interval", "square", "simplex+cubic", "hirzebruch+cubic"):
    pot = pots[name]
    y = pot.polytope.centroid
    s = float(abreu_scalar(pot, y))
    r = riemann_scalar_oracle(pot, y)
    print(f"{name:18s} polytope formula {s:9.5f}  oracle {r:9.5f}  ratio {r / s:.6f}")

report = calibrate()
print("kappa =", report.kappa, " max relative spread", report.max_deviation)
