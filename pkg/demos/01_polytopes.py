"""
Delzant polytopes and their lattice points
==========================================

Build the standard moment polytopes, look at their vertices and count the
lattice points of the dilations N * Delta.
"""

import numpy as np

from torickahler import DelzantError, DelzantPolytope, dilate, hirzebruch, simplex

# a Hirzebruch trapezoid: y >= 0, y1 + y2 <= 2, y2 <= 1
trap = hirzebruch(1, 2, 1)
print("vertices:\n", trap.vertices)
print("l_i at the centroid:", trap.l(trap.centroid))

# lattice point counts grow like vol * N^2 + (boundary length / 2) * N + 1
for N in (1, 2, 5, 10, 50):
    print(f"N={N:3d}  #lattice points = {len(trap.lattice_points(N))}")

# on the 2-simplex the count is (N+1)(N+2)/2
cp2 = simplex(2)
print("simplex, N=10:", len(cp2.lattice_points(10)), "expected", 11 * 12 // 2)

# the smoothness (Delzant) check names the offending vertex
try:
    DelzantPolytope([((-1, 0), 0), ((1, -2), 0), ((0, 1), 1)])
except DelzantError as exc:
    print("rejected:", exc)

# dilations move facets outward by h_i, the result is a plain polytope
big = dilate(cp2, [0.1, 0.0, 0.2])
print("dilated simplex vertices:\n", np.round(big.vertices, 3))
