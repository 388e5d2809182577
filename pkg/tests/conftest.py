import numpy as np
import pytest

from torickahler import standard_polytopes, standard_potentials

POTENTIALS = standard_potentials()
POLYTOPES = standard_polytopes()


def interior_points(poly, count, seed=0, shrink=0.9):
    """Random convex combinations of the vertices pulled toward the centroid."""
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(len(poly.vertices)), size=count)
    c = poly.centroid
    return c + shrink * (w @ poly.vertices - c)


@pytest.fixture(params=sorted(POTENTIALS))
def any_potential(request):
    return POTENTIALS[request.param]


@pytest.fixture(params=sorted(POLYTOPES))
def any_polytope(request):
    return POLYTOPES[request.param]


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
