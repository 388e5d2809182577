"""Large-N expansions: Laplace approximation, psi-sharp coefficients,
Euler-Maclaurin lattice sums and power-law coefficient fits."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .curvature import inverse_hessian_derivatives
from .phi import PhiEvaluator
from .polytope import Polytope
from .potential import SymplecticPotential
from .quadrature import PolytopeIntegrator, QuadratureSpec, facet_integral
from .sections import SectionFamily, TestFunction, psi_sharp

__all__ = [
    "ExpansionFit",
    "FitWarning",
    "todd_tau",
    "log_laplace_norm",
    "laplace_norm",
    "psi_sharp",
    "psi_sharp_expansion_coeff",
    "euler_maclaurin_sum",
    "fit_expansion",
    "measure_expansion",
    "measure_targets",
    "tyz_fit",
    "tyz_ratio",
]


class FitWarning(UserWarning):
    """Power-law fit is poorly determined."""


def todd_tau(s):
    """``s / (1 - e^{-s}) = 1 + s/2 + s^2/12 + ...`` (1 at ``s = 0``)."""
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < 1e-4
    safe = np.where(small, 1.0, s)
    return np.where(small, 1 + s / 2 + s ** 2 / 12, safe / -np.expm1(-safe))


def log_laplace_norm(potential: SymplecticPotential, x, N: int) -> float:
    """Log of the Laplace approximation to ``int exp(2N phi(x, y)) dy``.

    The ``y``-Hessian of ``2 phi`` at its maximum ``y = x`` is ``-2 G(x)``,
    giving ``(pi/N)^{n/2} det G(x)^{-1/2} exp(2N phi(x, x))``.
    """
    x = np.asarray(x, dtype=float)
    n = potential.dim
    _, logdet = np.linalg.slogdet(potential.hess(x))
    return float(0.5 * n * np.log(np.pi / N) - 0.5 * logdet
                 + 2 * N * PhiEvaluator(potential).phi_self(x))


def laplace_norm(potential: SymplecticPotential, x, N: int) -> float:
    return float(np.exp(log_laplace_norm(potential, x, N)))


def psi_sharp_expansion_coeff(potential: SymplecticPotential, psi: TestFunction, x) -> float:
    """Coefficient ``c`` in ``psi_sharp(x) = psi(x) + c/N + O(1/N^2)``.

    ``c = (1/2) (1/2 psi_ab G^ab + psi_a d_b G^ab)`` with exact derivatives.
    """
    x = np.asarray(x, dtype=float)
    ginv, dginv, _ = inverse_hessian_derivatives(potential, x)
    div = np.einsum("bab->a", dginv)  # sum_b d_b G^{ab}
    bracket = 0.5 * np.sum(psi.hess(x) * ginv) + psi.grad(x) @ div
    return float(0.5 * bracket)


def euler_maclaurin_sum(poly: Polytope, f: Callable, N: int, order: int = 1,
                        spec: QuadratureSpec | None = None) -> float:
    """Approximate ``sum_{m in [N Delta]} f(m/N)`` from integrals over dilations.

    Order 0 is ``N^n int f``; order 1 adds ``N^{n-1}/2 sum_i d/dh_i int_{Delta_h} f``,
    the first term of the product of ``tau(d/dh_i / N)`` over facets.
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    n = poly.dim
    total = PolytopeIntegrator(poly, spec).integrate(f).value
    if order == 1:
        total += sum(facet_integral(poly, i, f, spec) for i in range(poly.n_facets)) / (2 * N)
    return float(N ** n * total)


@dataclass
class ExpansionFit:
    """Least-squares fit ``values ~ sum_k coeffs[k] N^exponents[k]``."""

    exponents: list[int]
    coefficients: list[float]
    residual: float
    N: list[int]
    values: list[float]
    targets: list[float] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        """``coefficients[1] / coefficients[0]``."""
        return self.coefficients[1] / self.coefficients[0]

    @property
    def relative_errors(self) -> list[float]:
        return [abs(c - t) / abs(t) if t else abs(c)
                for c, t in zip(self.coefficients, self.targets)]

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.targets:
            out["relative_errors"] = self.relative_errors
        return out


def fit_expansion(Ns: Sequence[int], values: Sequence[float], n: int,
                  terms: int = 2) -> ExpansionFit:
    """Fit ``c_0 N^n + c_1 N^(n-1) [+ c_2 N^(n-2)]`` with regressors scaled by ``N_max``."""
    Ns = np.asarray(Ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(np.diff(Ns) <= 0):
        raise ValueError("N values must be strictly increasing")
    if len(Ns) < terms + 1:
        raise ValueError(f"need at least {terms + 1} N values to fit {terms} terms")
    if terms > 2:
        warnings.warn("third expansion coefficient is not validated", FitWarning, stacklevel=2)
    exps = [n - k for k in range(terms)]
    nmax = Ns.max()
    design = np.stack([(Ns / nmax) ** e for e in exps], axis=1)
    if np.linalg.cond(design) > 1e8 or Ns[0] / nmax > 0.5:
        warnings.warn("N values too clustered for a stable fit", FitWarning, stacklevel=2)
    sol, *_ = np.linalg.lstsq(design, values, rcond=None)
    coeffs = [float(c / nmax ** e) for c, e in zip(sol, exps)]
    resid = float(np.linalg.norm(design @ sol - values))
    return ExpansionFit(exps, coeffs, resid, [int(v) for v in Ns], values.tolist())


def measure_targets(potential: SymplecticPotential, psi: TestFunction,
                    spec: QuadratureSpec | None = None) -> tuple[float, float]:
    """Predicted ``(c_0, c_1) = (int psi, -1/4 int psi d_a d_b G^ab)``."""
    from .curvature import abreu_scalar

    integ = PolytopeIntegrator(potential.polytope, spec)
    c0 = integ.integrate(psi).value

    def weighted(y):
        out = psi(y)
        live = out != 0
        if np.any(live):
            out = out.copy()
            out[live] *= abreu_scalar(potential, y[live]) / 2
        return out

    c1 = integ.integrate(weighted).value
    return float(c0), float(c1)


def measure_expansion(potential: SymplecticPotential, psi: TestFunction, Ns: Sequence[int],
                      spec: QuadratureSpec | None = None, workers: int = 1) -> ExpansionFit:
    """Fit ``int psi mu_N ~ c_0 N^n + c_1 N^(n-1)`` over an N sweep.

    ``targets`` holds the predicted coefficients from :func:`measure_targets`.
    """
    n = potential.dim
    if len(Ns) < 3:
        raise ValueError("measure_expansion needs at least three N values")
    if psi.is_zero():
        return ExpansionFit([n, n - 1], [0.0, 0.0], 0.0, list(Ns), [0.0] * len(Ns), [0.0, 0.0])
    vals = [SectionFamily(potential, N, spec, workers).measure_apply(psi) for N in Ns]
    fit = fit_expansion(Ns, vals, n)
    fit.targets = list(measure_targets(potential, psi, spec))
    return fit


def tyz_fit(potential: SymplecticPotential, y, Ns: Sequence[int],
            spec: QuadratureSpec | None = None, workers: int = 1) -> ExpansionFit:
    """Fit ``rho_N(y) ~ b_0 N^n + b_1 N^(n-1)`` at one or several points.

    For several points (shape ``(k, n)``) one fit per point is returned.
    """
    y = np.asarray(y, dtype=float)
    n = potential.dim
    pts = np.atleast_2d(y)
    rho = np.array([np.atleast_1d(SectionFamily(potential, N, spec, workers)
                                  .density_of_states(pts)) for N in Ns])
    fits = [fit_expansion(Ns, rho[:, j], n) for j in range(len(pts))]
    return fits[0] if y.ndim == 1 else fits


def tyz_ratio(potential: SymplecticPotential, y, Ns: Sequence[int],
              spec: QuadratureSpec | None = None, workers: int = 1) -> float:
    """``b_1 / b_0`` from :func:`tyz_fit`, an estimate of half the scalar curvature."""
    return tyz_fit(potential, y, Ns, spec, workers).ratio
