import csv

import numpy as np
import pytest
from scipy.special import betaln

from torickahler import (
    Bump,
    Constant,
    Polynomial,
    PolynomialFunction,
    SectionFamily,
    SymplecticPotential,
    integrate,
    interval,
    square,
)
from torickahler.polytope import Polytope
from torickahler.sections import log_norm

from conftest import POTENTIALS


@pytest.fixture(scope="module")
def fam100():
    return SectionFamily(POTENTIALS["interval"], 100)


def window(center, half):
    return Polytope([[-1.0], [1.0]], [half - center, center + half])


def rho_interval(N, y):
    """Closed form of the density of states on the canonical interval."""
    return (2 * N + 1) / 2 * (1 + (1 - 2 * y) ** (2 * N))


class TestNorms:
    @pytest.mark.parametrize("N", [5, 40])
    def test_beta_function(self, N):
        fam = SectionFamily(POTENTIALS["interval"], N)
        m = fam.lattice.points[:, 0]
        exact = betaln(2 * m + 1, 2 * (N - m) + 1) - 2 * N
        assert np.allclose(fam.log_norms, exact, rtol=0, atol=1e-8)

    def test_finite_positive(self):
        fam = SectionFamily(POTENTIALS["hirzebruch+cubic"], 6)
        assert np.all(np.isfinite(fam.log_norms))

    def test_threads_agree(self):
        a = SectionFamily(POTENTIALS["simplex+cubic"], 5).log_norms
        b = SectionFamily(POTENTIALS["simplex+cubic"], 5, workers=4).log_norms
        assert np.array_equal(a, b)

    def test_huge_exponent_does_not_overflow(self):
        assert np.isfinite(log_norm(POTENTIALS["interval"], np.array([0.5]), 5000))


class TestSectionDensity:
    @pytest.mark.parametrize("name, N", [("interval+cubic", 30), ("simplex", 6), ("square+cubic", 4)])
    def test_normalized(self, name, N):
        fam = SectionFamily(POTENTIALS[name], N)
        for m in fam.lattice.points[:: max(1, len(fam) // 7)]:
            total = integrate(fam.potential.polytope, lambda y: fam.section_density(m, y)).value
            assert total == pytest.approx(1.0, rel=1e-6)

    def test_peak_contrast(self, fam100):
        ratio = fam100.section_density([50], [0.5]) / fam100.section_density([50], [0.3])
        assert ratio > 1e3

    def test_unknown_lattice_point(self, fam100):
        with pytest.raises(KeyError):
            fam100.section_density([101], [0.5])

    def test_concentration_window(self):
        fracs = []
        for N in (25, 50, 100, 200):
            fam = SectionFamily(POTENTIALS["interval"], N)
            m = [N // 2]
            w = N ** (-1 / 3)
            inside = integrate(window(0.5, w), lambda y: fam.section_density(m, y)).value
            fracs.append(inside)
        assert np.all(np.diff(fracs) > 0) and fracs[-1] > 0.999

    def test_delta_concentration(self):
        tails = []
        for N in (25, 50, 100):
            fam = SectionFamily(POTENTIALS["interval"], N)
            inside = integrate(window(0.5, 0.1), lambda y: fam.section_density([N // 2], y)).value
            tails.append(1 - inside)
        assert tails[0] / tails[1] >= 3 and tails[1] / tails[2] >= 3


class TestDensityOfStates:
    @pytest.mark.parametrize("y", [0.1, 0.3, 0.5, 0.9])
    def test_closed_form(self, fam100, y):
        assert fam100.density_of_states([y]) == pytest.approx(rho_interval(100, y), rel=1e-9)

    def test_vectorized(self, fam100):
        ys = np.array([[0.2], [0.6]])
        assert fam100.density_of_states(ys) == pytest.approx(
            [fam100.density_of_states(y) for y in ys])

    @pytest.mark.parametrize("name, N", [("interval+cubic", 20), ("square", 5)])
    def test_total_mass(self, name, N):
        fam = SectionFamily(POTENTIALS[name], N)
        total = integrate(fam.potential.polytope, fam.density_of_states).value
        assert total == pytest.approx(len(fam), rel=1e-6)

    def test_simplex_positive(self):
        fam = SectionFamily(POTENTIALS["simplex"], 20)
        assert 0 < fam.density_of_states(np.array([1 / 3, 1 / 3])) < np.inf
        grid = np.array([[a, b] for a in np.linspace(0.05, 0.9, 8) for b in np.linspace(0.05, 0.9, 8)
                         if a + b < 0.95])
        assert np.all(fam.density_of_states(grid) > 0)


class TestMeasure:
    def test_constant(self):
        fam = SectionFamily(POTENTIALS["simplex+cubic"], 7)
        assert fam.measure_apply(Constant(1.0)) == len(fam)

    def test_zero(self, fam100):
        assert fam100.measure_apply(Bump([0.5], 0.2, scale=0.0)) == 0.0

    def test_fubini(self):
        pot = POTENTIALS["interval+cubic"]
        fam = SectionFamily(pot, 40)
        psi = Bump([0.45], 0.3)
        lhs = fam.measure_apply(psi)
        rhs = integrate(interval(1), lambda y: psi(y) * fam.density_of_states(y)).value
        assert lhs == pytest.approx(rhs, rel=1e-6)

    def test_leading_term(self, fam100):
        psi = Bump([0.5], 0.25)
        target = integrate(interval(1), psi).value
        assert fam100.measure_apply(psi) / 100 == pytest.approx(target, rel=0.01)

    def test_polynomial_on_square(self):
        pot = POTENTIALS["square"]
        fam = SectionFamily(pot, 6)
        psi = PolynomialFunction(Polynomial([((1, 1), 1.0)]))
        lhs = fam.measure_apply(psi)
        rhs = integrate(square(1, 1), lambda y: psi(y) * fam.density_of_states(y)).value
        assert lhs == pytest.approx(rhs, rel=1e-5)


class TestBump:
    def test_derivatives(self):
        psi = Bump([0.4, 0.5], 0.3, scale=2.0)
        y = np.array([0.5, 0.45])
        h = 1e-5
        fd = np.array([(psi(y + h * e) - psi(y - h * e)) / (2 * h) for e in np.eye(2)])
        fdd = np.array([(psi.grad(y + h * e) - psi.grad(y - h * e)) / (2 * h) for e in np.eye(2)])
        assert np.allclose(fd, psi.grad(y), rtol=1e-7)
        assert np.allclose(fdd, psi.hess(y), rtol=1e-6)

    def test_support(self):
        assert Bump([0.5], 0.25).compactly_supported_in(interval(1))
        assert not Bump([0.2], 0.25).compactly_supported_in(interval(1))
        assert Bump([0.5], 0.3)([0.85]) == 0.0

    def test_invalid_radius(self):
        with pytest.raises(ValueError):
            Bump([0.5], 0.0)


def test_csv_exports(tmp_path):
    fam = SectionFamily(POTENTIALS["interval"], 4)
    fam.write_norms_csv(tmp_path / "norms.csv")
    fam.write_density_csv(tmp_path / "rho.csv", [[0.25], [0.5]])
    norms = list(csv.reader(open(tmp_path / "norms.csv")))
    rho = list(csv.reader(open(tmp_path / "rho.csv")))
    assert norms[0] == ["m0", "log_norm", "norm"] and len(norms) == 6
    assert float(rho[2][1]) == pytest.approx(rho_interval(4, 0.5))


def test_canonical_potential_object_reused():
    pot = SymplecticPotential(interval(2))
    fam = SectionFamily(pot, 3)
    assert len(fam) == 7
