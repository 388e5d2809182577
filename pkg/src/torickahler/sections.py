"""Weight-basis sections: normalized densities, density of states, spectral measure.

For the lattice point ``m`` of ``N Delta`` the orthonormal section ``s_m``
has squared norm

    |s_m|^2(y) = exp(2N phi(m/N, y)) / int_Delta exp(2N phi(m/N, y')) dy'

with Lebesgue measure on the polytope (the torus volume cancels).  Norms
are kept as logarithms: ``log Z_m = 2N phi(x, x) + log int exp(2N (phi(x, y) - phi(x, x))) dy``.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property

import numpy as np

from .phi import PhiEvaluator
from .polynomial import Polynomial
from .potential import SymplecticPotential
from .quadrature import PolytopeIntegrator, QuadratureSpec

__all__ = [
    "TestFunction",
    "Bump",
    "PolynomialFunction",
    "Constant",
    "SectionFamily",
    "log_norm",
    "psi_sharp",
]


class TestFunction:
    """Smooth function on the polytope with analytic first and second derivatives."""

    __test__ = False  # not a pytest class

    def __call__(self, y):
        raise NotImplementedError

    def grad(self, y):
        raise NotImplementedError

    def hess(self, y):
        raise NotImplementedError

    def integral(self, integrator: PolytopeIntegrator) -> float:
        return integrator.integrate(self).value

    def is_zero(self) -> bool:
        return False

    def compactly_supported_in(self, poly) -> bool:
        return False


class Bump(TestFunction):
    """``exp(-1 / (1 - |y - c|^2 / r^2))`` inside the ball, zero outside."""

    def __init__(self, center, radius: float, scale: float = 1.0):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.scale = float(scale)
        if not self.radius > 0:
            raise ValueError("bump radius must be positive")

    def __repr__(self):
        return f"Bump(center={self.center.tolist()}, radius={self.radius}, scale={self.scale})"

    def _parts(self, y):
        y = np.asarray(y, dtype=float)
        d = y - self.center
        q = np.sum(d * d, axis=-1) / self.radius ** 2
        inside = q < 1
        t = np.where(inside, 1 - q, 1.0)
        psi = np.where(inside, self.scale * np.exp(-1 / t), 0.0)
        psi_q = -psi / t ** 2
        psi_qq = psi / t ** 4 - 2 * psi / t ** 3
        return d, psi, psi_q, psi_qq

    def __call__(self, y):
        return self._parts(y)[1]

    def grad(self, y):
        d, _, psi_q, _ = self._parts(y)
        return psi_q[..., None] * 2 * d / self.radius ** 2

    def hess(self, y):
        d, _, psi_q, psi_qq = self._parts(y)
        r2 = self.radius ** 2
        n = d.shape[-1]
        outer = np.einsum("...a,...b->...ab", d, d) * 4 / r2 ** 2
        return psi_qq[..., None, None] * outer + psi_q[..., None, None] * 2 / r2 * np.eye(n)

    def is_zero(self) -> bool:
        return self.scale == 0

    def compactly_supported_in(self, poly) -> bool:
        margin = poly.l(self.center) - self.radius * np.linalg.norm(poly.normals, axis=1)
        return bool(np.all(margin > 0))


class PolynomialFunction(TestFunction):
    def __init__(self, poly: Polynomial):
        self.poly = poly

    def __repr__(self):
        return f"PolynomialFunction({self.poly!r})"

    def __call__(self, y):
        return self.poly(y)

    def grad(self, y):
        return self.poly.grad(y)

    def hess(self, y):
        return self.poly.hess(y)

    def is_zero(self) -> bool:
        return not self.poly


class Constant(TestFunction):
    def __init__(self, value: float = 1.0):
        self.value = float(value)

    def __repr__(self):
        return f"Constant({self.value})"

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.full(y.shape[:-1], self.value)

    def grad(self, y):
        return np.zeros(np.shape(y))

    def hess(self, y):
        y = np.asarray(y)
        return np.zeros(y.shape + y.shape[-1:])

    def is_zero(self) -> bool:
        return self.value == 0


def _peak_integrand(ev: PhiEvaluator, x, N: int, weight=None):
    top = ev.phi_self(x)

    def f(y):
        out = np.exp(2 * N * (ev.phi(x, y) - top))
        if weight is not None:
            out = out * weight(y)
        return out

    return f, top


def log_norm(potential: SymplecticPotential, x, N: int,
             integrator: PolytopeIntegrator | None = None) -> float:
    """``log int_Delta exp(2N phi(x, y)) dy`` for ``x`` in the closed polytope."""
    ev = PhiEvaluator(potential)
    integrator = integrator or PolytopeIntegrator(potential.polytope)
    f, top = _peak_integrand(ev, np.asarray(x, dtype=float), N)
    return float(2 * N * top + np.log(integrator.integrate(f).value))


def psi_sharp(potential: SymplecticPotential, psi: TestFunction, x, N: int,
              integrator: PolytopeIntegrator | None = None, log_z: float | None = None) -> float:
    """Average of ``psi`` against the normalized density ``exp(2N phi(x, .))``.

    ``log_z`` may carry a precomputed :func:`log_norm` for the same ``x``.
    """
    if psi.is_zero():
        return 0.0
    if isinstance(psi, Constant):
        return psi.value
    x = np.asarray(x, dtype=float)
    ev = PhiEvaluator(potential)
    integrator = integrator or PolytopeIntegrator(potential.polytope)
    f, top = _peak_integrand(ev, x, N)
    z = integrator.integrate(f).value if log_z is None else np.exp(log_z - 2 * N * top)
    num, _ = _peak_integrand(ev, x, N, weight=psi)
    # absolute tolerance relative to the denominator: psi-weighted mass may vanish
    rtol = integrator.spec.rtol
    return integrator.integrate(num, atol=rtol * z).value / z


class SectionFamily:
    """All normalized weight sections of ``L^N`` for one potential.

    Parameters
    ----------
    potential : SymplecticPotential
    N : int
        Tensor power.
    spec : QuadratureSpec, optional
    workers : int
        Threads used for the per-lattice-point norm integrals.
    """

    def __init__(self, potential: SymplecticPotential, N: int,
                 spec: QuadratureSpec | None = None, workers: int = 1):
        self.potential = potential
        self.N = int(N)
        self.lattice = potential.polytope.lattice_points(self.N)
        self.integrator = PolytopeIntegrator(potential.polytope, spec)
        self.workers = max(1, int(workers))
        self._phi = PhiEvaluator(potential)

    def __len__(self):
        return len(self.lattice)

    @property
    def weights(self) -> np.ndarray:
        return self.lattice.weights

    def _map(self, fn, items):
        if self.workers == 1:
            return [fn(it) for it in items]
        with ThreadPoolExecutor(self.workers) as pool:
            return list(pool.map(fn, items))

    @cached_property
    def log_norms(self) -> np.ndarray:
        """``log ||e^{m.z}||^2`` (Lebesgue ``dy`` only) for every lattice point."""
        vals = self._map(lambda x: log_norm(self.potential, x, self.N, self.integrator),
                         self.weights)
        out = np.array(vals)
        if not np.all(np.isfinite(out)):
            raise ArithmeticError("non-finite section norm")
        return out

    def index(self, m) -> int:
        hits = np.flatnonzero(np.all(self.lattice.points == np.asarray(m), axis=1))
        if not len(hits):
            raise KeyError(f"{m} is not a lattice point of {self.N} Delta")
        return int(hits[0])

    def section_density(self, m, y):
        """``|s_m|^2(y)`` for the lattice point ``m`` at interior ``y``."""
        k = self.index(m)
        x = self.weights[k]
        return np.exp(2 * self.N * self._phi.phi(x, y) - self.log_norms[k])

    def density_of_states(self, y):
        """``rho_N(y) = sum_m |s_m|^2(y)``; accepts ``y`` of shape ``(n,)`` or ``(k, n)``."""
        y = np.asarray(y, dtype=float)
        single = y.ndim == 1
        ys = np.atleast_2d(y)
        x = self.weights
        out = np.empty(len(ys))
        for j, yy in enumerate(ys):
            expo = 2 * self.N * self._phi.phi(x, yy) - self.log_norms
            out[j] = np.sum(np.exp(expo))
        return out[0] if single else out

    def measure_apply(self, psi: TestFunction) -> float:
        """``int psi mu_N = sum_m psi_sharp(m/N)``."""
        if psi.is_zero():
            return 0.0
        if isinstance(psi, Constant):
            return psi.value * len(self)
        vals = self._map(
            lambda k: psi_sharp(self.potential, psi, self.weights[k], self.N,
                                self.integrator, log_z=self.log_norms[k]),
            range(len(self)))
        return float(np.sum(vals))

    def write_norms_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"m{k}" for k in range(self.potential.dim)] + ["log_norm", "norm"])
            for m, ln in zip(self.lattice.points, self.log_norms):
                w.writerow([int(v) for v in m] + [repr(float(ln)), repr(float(np.exp(ln)))])

    def write_density_csv(self, path, points) -> None:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rho = self.density_of_states(points)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"y{k}" for k in range(self.potential.dim)] + ["rho"])
            for y, r in zip(points, np.atleast_1d(rho)):
                w.writerow([repr(float(v)) for v in y] + [repr(float(r))])
