"""
The phi function and where it peaks
====================================

phi(x, y) = g(y) + (x - y) . grad g(y) is the log-density of the weight x
section.  For interior x it has a unique maximum at y = x; for x on a facet
the facet restriction peaks at x and the normal derivative stays nonzero.
"""

import numpy as np

from torickahler import PhiEvaluator, standard_potentials
from torickahler.phi import lemma_suite

pots = standard_potentials()
ev = PhiEvaluator(pots["hirzebruch+cubic"])

x = np.array([0.6, 0.3])
print("Newton argmax from the centroid:", ev.argmax(x), " target", x)

# scan a line through x
ts = np.linspace(0.05, 0.95, 7)
line = np.stack([ts, np.full_like(ts, 0.3)], axis=1)
print("phi(x, .) along y2 = 0.3:", np.round(ev.phi(x, line), 4))

# the full property suite on every standard potential
for name, pot in pots.items():
    res = lemma_suite(pot, n_samples=20)
    print(f"{name:18s}", {k: v["passed"] for k, v in res.items()})
