"""
Symplectic potentials and the Legendre transform
================================================

The canonical potential g0 = sum l_i log l_i - l_i, a cubic perturbation of
it, and the Legendre map y -> u = grad g with its Newton inverse.
"""

import numpy as np

from torickahler import Polynomial, SymplecticPotential, interval, square

pot = SymplecticPotential(interval(1))
print("g0(0.5) =", pot.g([0.5]), " (-(log 2 + 1))")
print("G(0.5) =", pot.hess([0.5])[0, 0], "  G^-1(0.3) =", pot.hess_inv([0.3])[0, 0])

u = pot.legendre_forward([0.3])
print("u(0.3) =", u, " back:", pot.legendre_inverse(u))

# on the square with a small cubic term the metric is no longer a product
pert = Polynomial([((3, 0), 0.05), ((1, 2), 0.05)])
sq = SymplecticPotential(square(1, 1), pert)
report = sq.validate()
print("perturbed square valid:", report.passed, " min eigenvalue", round(report.min_eigenvalue, 4))

# points close to a facet map to large |u|; the inverse still recovers them
y = np.array([0.5, 1e-6])
print("near-facet round trip error:", np.abs(sq.legendre_inverse(sq.grad(y)) - y).max())

# a strongly concave perturbation is caught by the validator
bad = SymplecticPotential(interval(1), Polynomial([((2,), -10.0)]))
print("g0 - 10 y^2 valid:", bad.validate().passed)
