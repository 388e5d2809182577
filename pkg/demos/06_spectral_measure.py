"""
The spectral measure against a bump
===================================

sum_m psi_sharp(m/N) ~ c0 N^n + c1 N^(n-1) with c0 = int psi and
c1 = int psi * s / 2.  The same c1 comes out of an Euler-Maclaurin
argument, whose exactness on f = 1 is checked first.
"""

import numpy as np

from torickahler import Bump, euler_maclaurin_sum, interval, measure_expansion, square, standard_potentials


def one(y):
    return np.ones(len(y))


for N in (10, 20, 40):
    print(f"N={N}: interval {euler_maclaurin_sum(interval(1), one, N, 1):.6f} (N+1),"
          f" square {euler_maclaurin_sum(square(1, 1), one, N, 1):.6f} vs {(N + 1) ** 2}")

psi = Bump([0.5], 0.25)
for name in ("interval", "interval+cubic"):
    fit = measure_expansion(standard_potentials()[name], psi, [50, 100, 200, 400])
    print(f"{name:15s} fitted {np.round(fit.coefficients, 6)}  predicted {np.round(fit.targets, 6)}")
