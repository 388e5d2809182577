"""
Scalar curvature from the density of states
===========================================

Fit rho_N(y) ~ b0 N^n + b1 N^(n-1).  The ratio b1/b0 should equal half the
scalar curvature computed from the inverse Hessian of g.
"""

import numpy as np

from torickahler import abreu_scalar, standard_potentials, tyz_fit

pots = standard_potentials()

pot = pots["interval+cubic"]
ys = np.array([[0.3], [0.5], [0.7]])
for y, fit in zip(ys, tyz_fit(pot, ys, [25, 50, 100, 200])):
    print(f"y={y[0]:.1f}  b1/b0={fit.ratio:.4f}  s/2={abreu_scalar(pot, y) / 2:.4f}")

# CP^2 at the barycenter: s = 3, so the ratio should be near 1.5
cp2 = pots["simplex"]
fit = tyz_fit(cp2, np.array([1 / 3, 1 / 3]), [10, 20, 40], workers=4)
print("simplex rho:", fit.values, " b1/b0 =", round(fit.ratio, 3))
