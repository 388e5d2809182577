import numpy as np
import pytest

from torickahler import BoundaryError, PhiEvaluator, SymplecticPotential, interval, simplex, square
from torickahler.phi import lemma_suite

from conftest import POTENTIALS, interior_points

LOG_HALF_MINUS_ONE = np.log(0.5) - 1


@pytest.fixture
def interval_ev():
    return PhiEvaluator(SymplecticPotential(interval(1)))


class TestValues:
    def test_diagonal(self, interval_ev):
        assert interval_ev.phi([0.5], [0.5]) == pytest.approx(LOG_HALF_MINUS_ONE, abs=1e-12)

    def test_off_diagonal(self, interval_ev):
        assert interval_ev.phi([0.3], [0.5]) == pytest.approx(LOG_HALF_MINUS_ONE, abs=1e-12)

    @pytest.mark.parametrize("name", sorted(POTENTIALS))
    def test_diagonal_is_potential(self, name):
        pot = POTENTIALS[name]
        ev = PhiEvaluator(pot)
        ys = interior_points(pot.polytope, 10, seed=1)
        assert np.allclose(ev.phi(ys, ys), pot.g(ys), atol=1e-12)
        assert np.allclose(ev.phi_self(ys), pot.g(ys), atol=1e-12)

    @pytest.mark.parametrize("name", sorted(POTENTIALS))
    def test_matches_definition(self, name):
        pot = POTENTIALS[name]
        ev = PhiEvaluator(pot)
        xs = interior_points(pot.polytope, 10, seed=2)
        ys = interior_points(pot.polytope, 10, seed=3)
        direct = pot.g(ys) + np.einsum("ka,ka->k", xs - ys, pot.grad(ys))
        assert np.allclose(ev.phi(xs, ys), direct, atol=1e-12)

    def test_boundary_x(self, interval_ev):
        # 0 log 0 = 0 at the left endpoint
        assert interval_ev.phi([0.0], [0.5]) == pytest.approx(LOG_HALF_MINUS_ONE)
        assert interval_ev.phi_self([0.0]) == pytest.approx(-1.0)

    def test_boundary_y_rejected(self, interval_ev):
        with pytest.raises(BoundaryError):
            interval_ev.phi([0.5], [1.0])


class TestGradient:
    def test_example(self, interval_ev):
        assert interval_ev.grad_y([0.3], [0.5]) == pytest.approx([-0.8])

    def test_zero_on_diagonal(self, any_potential):
        ev = PhiEvaluator(any_potential)
        y = any_potential.polytope.centroid
        assert np.allclose(ev.grad_y(y, y), 0, atol=1e-14)

    @pytest.mark.parametrize("name", sorted(POTENTIALS))
    def test_finite_differences(self, name):
        pot = POTENTIALS[name]
        ev = PhiEvaluator(pot)
        h = 1e-4
        for x, y in zip(interior_points(pot.polytope, 8, seed=4),
                        interior_points(pot.polytope, 8, seed=5, shrink=0.7)):
            grad = ev.grad_y(x, y)
            fd = np.array([(ev.phi(x, y + h * e) - ev.phi(x, y - h * e)) / (2 * h)
                           for e in np.eye(pot.dim)])
            hess_fd = np.array([(ev.grad_y(x, y + h * e) - ev.grad_y(x, y - h * e)) / (2 * h)
                                for e in np.eye(pot.dim)])
            assert np.allclose(fd, grad, rtol=1e-6, atol=1e-8)
            assert np.allclose(hess_fd, ev.hess_y(x, y), rtol=1e-6, atol=1e-6)


class TestFacetRestriction:
    def test_simplex_example(self):
        ev = PhiEvaluator(SymplecticPotential(simplex(2)))
        # facet index 1 is {y2 = 0}
        assert ev.phi_facet(1, [0.5, 0.0], [0.5, 0.0]) == pytest.approx(LOG_HALF_MINUS_ONE)

    def test_square_grid_argmax(self):
        ev = PhiEvaluator(POTENTIALS["square+cubic"])
        x = np.array([0.37, 0.0])
        ys = np.stack([np.linspace(0.001, 0.999, 999), np.zeros(999)], axis=1)
        best = ys[np.argmax(ev.phi_facet(1, x, ys))]
        assert abs(best[0] - x[0]) <= 0.001 + 1e-12

    def test_equals_interior_limit(self):
        pot = POTENTIALS["simplex+cubic"]
        ev = PhiEvaluator(pot)
        x = np.array([0.3, 0.0])
        y = np.array([0.45, 0.0])
        near = ev.phi(x, y + [0, 1e-9])
        assert ev.phi_facet(1, x, y) == pytest.approx(near, abs=1e-6)

    @pytest.mark.parametrize("x, y", [([0.3, 0.1], [0.4, 0.0]), ([0.0, 0.0], [0.4, 0.0]),
                                      ([0.3, 0.0], [1.0, 0.0])])
    def test_rejects_points_off_relative_interior(self, x, y):
        ev = PhiEvaluator(SymplecticPotential(square(1, 1)))
        with pytest.raises(ValueError):
            ev.phi_facet(1, x, y)


class TestArgmax:
    @pytest.mark.parametrize("name", sorted(POTENTIALS))
    def test_returns_x(self, name):
        pot = POTENTIALS[name]
        ev = PhiEvaluator(pot)
        for x in interior_points(pot.polytope, 5, seed=7):
            assert np.linalg.norm(ev.argmax(x) - x) < 1e-8

    def test_from_far_start(self):
        pot = POTENTIALS["hirzebruch+cubic"]
        ev = PhiEvaluator(pot)
        x = np.array([0.2, 0.8])
        start = np.array([1.9, 0.02])
        assert np.linalg.norm(ev.argmax(x, start=start) - x) < 1e-8

    def test_decreases_toward_boundary(self):
        pot = POTENTIALS["square+cubic"]
        ev = PhiEvaluator(pot)
        x = np.array([0.4, 0.6])
        ts = 10.0 ** -np.arange(1, 9)
        vals = ev.phi(x, np.stack([0.4 + 0 * ts, ts], axis=1))
        assert np.all(np.diff(vals[-4:]) < 0)


class TestAlpha:
    def test_identity_for_canonical(self):
        ev = PhiEvaluator(POTENTIALS["hirzebruch"])
        for y in interior_points(ev.potential.polytope, 5, seed=8):
            assert np.allclose(ev.alpha(y), y, atol=1e-10)

    def test_bijection(self):
        pot = POTENTIALS["simplex+cubic"]
        ev = PhiEvaluator(pot)
        for y in interior_points(pot.polytope, 5, seed=9):
            a = ev.alpha(y)
            back = pot.legendre_inverse(pot.canonical.grad(a))
            assert np.allclose(back, y, atol=1e-8)

    def test_identity_at_interval_endpoint(self):
        ev = PhiEvaluator(POTENTIALS["interval+cubic"])
        ts = 10.0 ** -np.arange(1, 6)
        defect = [abs(ev.alpha([t])[0] - t) for t in ts]
        assert np.all(np.diff(defect) < 0) and defect[-1] < 1e-6

    def test_facet_preserved_but_not_fixed_in_2d(self):
        # alpha maps the facet {y2 = 0} to itself, but moves points along it
        ev = PhiEvaluator(POTENTIALS["square+cubic"])
        ts = 10.0 ** -np.arange(1, 6)
        a = np.array([ev.alpha([0.5, t]) for t in ts])
        assert np.all(np.diff(a[:, 1]) < 0) and a[-1, 1] < 2e-5
        assert abs(a[-1, 0] - 0.5) > 1e-3


class TestLemmaSuite:
    @pytest.mark.parametrize("name", ["interval", "square+cubic"])
    def test_all_pass(self, name):
        result = lemma_suite(POTENTIALS[name], n_samples=20)
        assert set(result) == {"interior_maximum", "facet_maximum", "alpha_boundary"}
        for check in result.values():
            assert check["passed"]
            assert len(check["samples"]) == 20

    def test_deterministic(self):
        a = lemma_suite(POTENTIALS["simplex+cubic"], n_samples=4, seed=3)
        b = lemma_suite(POTENTIALS["simplex+cubic"], n_samples=4, seed=3)
        assert a == b
