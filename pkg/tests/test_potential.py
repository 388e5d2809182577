import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torickahler import (
    BoundaryError,
    IllConditionedError,
    Polynomial,
    SymplecticPotential,
    interval,
    simplex,
)

from conftest import POTENTIALS, interior_points

LOG2 = np.log(2.0)


@pytest.fixture
def canonical_interval():
    return SymplecticPotential(interval(1))


class TestClosedForms:
    def test_value(self, canonical_interval):
        assert canonical_interval.g([0.5]) == pytest.approx(-(LOG2 + 1), abs=1e-12)

    def test_gradient(self, canonical_interval):
        assert canonical_interval.grad([0.5]) == pytest.approx([0.0], abs=1e-14)
        assert canonical_interval.grad([0.3])[0] == pytest.approx(np.log(0.3 / 0.7))

    def test_hessian(self, canonical_interval):
        assert canonical_interval.hess([0.5])[0, 0] == pytest.approx(4.0)

    @pytest.mark.parametrize("y", [0.1, 0.3, 0.5, 0.77])
    def test_inverse_hessian(self, canonical_interval, y):
        assert canonical_interval.hess_inv([y])[0, 0] == pytest.approx(y * (1 - y))

    def test_legendre_forward_examples(self, canonical_interval):
        assert canonical_interval.legendre_forward([0.3])[0] == pytest.approx(-0.847298, abs=1e-6)
        cp2 = SymplecticPotential(simplex(2))
        assert cp2.legendre_forward([1 / 3, 1 / 3]) == pytest.approx([0, 0], abs=1e-14)

    def test_legendre_inverse_examples(self, canonical_interval):
        assert canonical_interval.legendre_inverse([0.0])[0] == pytest.approx(0.5, abs=1e-12)
        assert canonical_interval.legendre_inverse([-0.847298])[0] == pytest.approx(0.3, abs=1e-6)

    def test_kahler_potential(self, canonical_interval):
        assert canonical_interval.kahler_potential([0.0]) == pytest.approx(LOG2 + 1, abs=1e-12)


def test_boundary_rejected(canonical_interval):
    with pytest.raises(BoundaryError):
        canonical_interval.g([1.0])
    with pytest.raises(BoundaryError):
        canonical_interval.hess([[0.5], [-0.1]])


def test_dimension_mismatch(canonical_interval):
    with pytest.raises(ValueError):
        canonical_interval.g([0.2, 0.3])


def test_ill_conditioned():
    pot = SymplecticPotential(simplex(2), max_condition=1e3)
    with pytest.raises(IllConditionedError):
        pot.hess_inv([1e-5, 0.5])


def _fd_check(f, df, y, h, rtol=1e-6):
    """Compare ``df(y)`` with a 4th-order central difference of ``f``."""
    n = len(y)
    exact = df(y)
    approx = np.empty_like(exact)
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        approx[..., k] = (-f(y + 2 * e) + 8 * f(y + e) - 8 * f(y - e) + f(y - 2 * e)) / (12 * h)
    scale = np.max(np.abs(exact)) + 1e-300
    assert np.max(np.abs(approx - exact)) / scale < rtol


@pytest.mark.parametrize("name", sorted(POTENTIALS))
def test_derivatives_match_finite_differences(name):
    pot = POTENTIALS[name]
    pairs = [(pot.g, pot.grad), (pot.grad, pot.hess), (pot.hess, pot.deriv3), (pot.deriv3, pot.deriv4)]
    for y in interior_points(pot.polytope, 5, seed=11, shrink=0.7):
        for f, df in pairs:
            # derivative index goes last in the difference; exact tensors are symmetric
            _fd_check(f, df, y, h=0.01 * float(np.min(pot.polytope.l(y))))


@pytest.mark.parametrize("name", sorted(POTENTIALS))
def test_inverse_hessian_identity(name):
    pot = POTENTIALS[name]
    ys = interior_points(pot.polytope, 100, seed=2)
    prod = np.einsum("kab,kbc->kac", pot.hess(ys), pot.hess_inv(ys))
    assert np.allclose(prod, np.eye(pot.dim), atol=1e-12)


@pytest.mark.parametrize("name", sorted(POTENTIALS))
def test_legendre_round_trip(name):
    pot = POTENTIALS[name]
    ys = interior_points(pot.polytope, 100, seed=4, shrink=0.98)
    for y in ys:
        back = pot.legendre_inverse(pot.legendre_forward(y))
        assert np.max(np.abs(back - y)) < 1e-10


@pytest.mark.parametrize("name", sorted(POTENTIALS))
def test_legendre_round_trip_dual(name):
    pot = POTENTIALS[name]
    rng = np.random.default_rng(5)
    for u in rng.normal(scale=3.0, size=(30, pot.dim)):
        y = pot.legendre_inverse(u)
        assert np.max(np.abs(pot.legendre_forward(y) - u)) <= 1e-10 * max(1, np.linalg.norm(u))


def test_legendre_inverse_near_facet():
    pot = POTENTIALS["hirzebruch+cubic"]
    p = pot.polytope.facet_point(2)
    y = p + 1e-5 * (pot.polytope.centroid - p)
    assert np.max(np.abs(pot.legendre_inverse(pot.grad(y)) - y)) < 1e-10


@pytest.mark.parametrize("name", sorted(POTENTIALS))
def test_young_identity(name):
    pot = POTENTIALS[name]
    for y in interior_points(pot.polytope, 10, seed=6):
        u = pot.grad(y)
        assert pot.kahler_potential(u) + pot.g(y) - y @ u == pytest.approx(0, abs=1e-10)


def test_kahler_hessian_is_inverse():
    pot = POTENTIALS["simplex+cubic"]
    y = np.array([0.25, 0.4])
    u = pot.grad(y)
    h = 1e-4
    jac = np.empty((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        jac[:, k] = (pot.legendre_inverse(u + e) - pot.legendre_inverse(u - e)) / (2 * h)
    assert np.allclose(jac, pot.hess_inv(y), rtol=1e-5, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.99))
def test_round_trip_property_interval(y):
    pot = POTENTIALS["interval+cubic"]
    assert pot.legendre_inverse(pot.grad([y]))[0] == pytest.approx(y, abs=1e-10)


class TestValidate:
    def test_standard_suite_passes(self, any_potential):
        assert any_potential.validate().passed

    def test_small_quadratic_passes(self):
        pot = SymplecticPotential(interval(1), Polynomial([((2,), 0.1)]))
        assert pot.validate().passed

    def test_concave_perturbation_fails(self):
        report = SymplecticPotential(interval(1), Polynomial([((2,), -10.0)])).validate()
        assert not report.positive_definite
        assert not report.passed
        assert report.min_eigenvalue < 0

    def test_kernel_norms_decrease(self):
        report = POTENTIALS["square+cubic"].validate()
        for norms in report.kernel_norms:
            assert np.all(np.diff(norms) < 0)
            assert norms[-1] < 1e-4 * norms[0]

    def test_report_dict(self):
        d = POTENTIALS["interval"].validate().to_dict()
        assert d["passed"] and set(d) >= {"positive_definite", "facet_kernel"}
