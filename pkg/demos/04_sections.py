"""
Section densities and the density of states
===========================================

|s_m|^2 = exp(2N phi(m/N, y)) / norm concentrates at y = m/N as N grows.
Summing over m gives rho_N(y), which on the canonical interval is
(2N+1)/2 * (1 + (1-2y)^(2N)).
"""

import numpy as np

from torickahler import SectionFamily, integrate, standard_potentials
from torickahler.polytope import Polytope

pot = standard_potentials()["interval"]

# integrate over the window [0.4, 0.6] itself rather than multiplying by an
# indicator, which would put a jump inside the quadrature cells
window = Polytope([[-1.0], [1.0]], [-0.4, 0.6])

for N in (25, 50, 100):
    fam = SectionFamily(pot, N)
    m = [N // 2]
    inside = integrate(window, lambda y: fam.section_density(m, y)).value
    print(f"N={N:3d}  mass within 0.1 of m/N: {inside:.4f}")

fam = SectionFamily(pot, 50)
ys = np.array([[0.1], [0.3], [0.5]])
print("rho_50:", fam.density_of_states(ys))
print("closed form:", 101 / 2 * (1 + (1 - 2 * ys[:, 0]) ** 100))

# on CP^2 the density is positive and close to N^2 (1 + 3/(2N))
cp2 = SectionFamily(standard_potentials()["simplex"], 20)
print("simplex rho_20(1/3,1/3) =", cp2.density_of_states(np.array([1 / 3, 1 / 3])))
