"""Symplectic potentials ``g = g0 + g_r`` on a Delzant polytope.

``g0 = sum_i l_i log l_i - l_i`` is the canonical (reduction) potential and
``g_r`` a polynomial perturbation.  All functions accept points with shape
``(..., n)`` and broadcast over the leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryError, ConvergenceError, IllConditionedError
from .polynomial import Polynomial
from .polytope import Polytope

__all__ = ["SymplecticPotential", "ValidationReport", "standard_perturbation", "standard_potentials"]


@dataclass
class ValidationReport:
    """Outcome of :meth:`SymplecticPotential.validate`."""

    positive_definite: bool
    min_eigenvalue: float
    facet_kernel: list[bool] = field(default_factory=list)
    kernel_norms: list[list[float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.positive_definite and all(self.facet_kernel)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "positive_definite": self.positive_definite,
                "min_eigenvalue": self.min_eigenvalue, "facet_kernel": self.facet_kernel,
                "kernel_norms": self.kernel_norms}


class SymplecticPotential:
    """Canonical potential of ``polytope`` plus an optional polynomial perturbation.

    Parameters
    ----------
    polytope : Polytope
    perturbation : Polynomial, optional
        Smooth part ``g_r``; zero when omitted.
    max_condition : float
        Largest Hessian condition number accepted by :meth:`hess_inv`.
    """

    def __init__(self, polytope: Polytope, perturbation: Polynomial | None = None,
                 max_condition: float = 1e12):
        self.polytope = polytope
        if perturbation is not None and perturbation.dim != polytope.dim:
            raise ValueError("perturbation dimension does not match the polytope")
        self.perturbation = perturbation if perturbation else None
        self.max_condition = max_condition
        self._U = polytope.normals

    def __repr__(self):
        return f"SymplecticPotential({self.polytope!r}, perturbation={self.perturbation!r})"

    @property
    def dim(self) -> int:
        return self.polytope.dim

    @property
    def is_canonical(self) -> bool:
        return self.perturbation is None

    @property
    def canonical(self) -> SymplecticPotential:
        """The unperturbed potential ``g0`` on the same polytope."""
        if self.is_canonical:
            return self
        return SymplecticPotential(self.polytope, max_condition=self.max_condition)

    def _l(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.dim:
            raise ValueError(f"point has dimension {y.shape[-1]}, expected {self.dim}")
        l = self.polytope.l(y)
        if not np.all(l > 0):
            raise BoundaryError("evaluation point is not in the interior of the polytope")
        return l

    def _pert(self, y, order: int):
        if self.perturbation is None:
            return 0.0
        return self.perturbation.deriv_tensor(y, order)

    def g(self, y):
        l = self._l(y)
        return np.sum(l * np.log(l) - l, axis=-1) + self._pert(y, 0)

    def grad(self, y):
        l = self._l(y)
        return -np.log(l) @ self._U + self._pert(y, 1)

    def hess(self, y):
        l = self._l(y)
        return np.einsum("...i,ia,ib->...ab", 1.0 / l, self._U, self._U) + self._pert(y, 2)

    def deriv3(self, y):
        l = self._l(y)
        return (np.einsum("...i,ia,ib,ic->...abc", l ** -2, self._U, self._U, self._U)
                + self._pert(y, 3))

    def deriv4(self, y):
        l = self._l(y)
        U = self._U
        return (2.0 * np.einsum("...i,ia,ib,ic,id->...abcd", l ** -3, U, U, U, U)
                + self._pert(y, 4))

    def hess_inv(self, y):
        """Inverse Hessian ``G^{ab}``; raises when the condition number is too large."""
        h = self.hess(y)
        cond = np.linalg.cond(h)
        if np.any(~np.isfinite(cond)) or np.any(cond > self.max_condition):
            raise IllConditionedError(
                f"Hessian condition number {np.max(cond):.3g} exceeds {self.max_condition:.3g}")
        return np.linalg.inv(h)

    def legendre_forward(self, y) -> np.ndarray:
        """Complex-coordinate real part ``u = g_y(y)``."""
        return self.grad(y)

    def legendre_inverse(self, u, start=None, tol: float = 1e-12, max_iter: int = 100):
        """The unique interior ``y`` with ``g_y(y) = u``.

        Damped Newton on the strictly convex ``g(y) - u.y`` from the centroid,
        halving steps until they stay inside the polytope and decrease the
        objective.
        """
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise ValueError(f"u must have shape ({self.dim},)")
        y = np.array(self.polytope.centroid if start is None else start, dtype=float)
        scale = tol * max(1.0, float(np.linalg.norm(u)))
        obj = self.g(y) - u @ y
        for _ in range(max_iter):
            r = self.grad(y) - u
            if np.linalg.norm(r) <= scale:
                return y
            step = np.linalg.solve(self.hess(y), r)
            # near a facet the residual floor (roundoff in log l) can exceed
            # ``scale``; a step at machine precision means y is converged
            if np.linalg.norm(step) <= 4 * np.finfo(float).eps * (1.0 + np.linalg.norm(y)):
                return y
            t = 1.0
            while True:
                trial = y - t * step
                if self.polytope.is_interior(trial):
                    trial_obj = self.g(trial) - u @ trial
                    slack = 1e-14 * (1.0 + abs(obj))  # roundoff floor near convergence
                    if trial_obj <= obj + 1e-4 * t * (r @ -step) + slack:
                        break
                t *= 0.5
                if t < 1e-30:
                    raise ConvergenceError("Legendre inversion line search failed")
            y, obj = trial, trial_obj
        if np.linalg.norm(self.grad(y) - u) <= scale:
            return y
        raise ConvergenceError(f"Legendre inversion did not converge in {max_iter} iterations")

    def kahler_potential(self, u) -> float:
        """``f(u) = y.u - g(y)`` with ``y`` the inverse Legendre image of ``u``."""
        y = self.legendre_inverse(u)
        return float(y @ np.asarray(u, dtype=float) - self.g(y))

    def validate(self, resolution: int = 20) -> ValidationReport:
        """Check positivity of the Hessian on an interior grid and the facet kernel condition.

        The kernel check follows ``|G^{-1}(y_t) u_i|`` along the segment from
        a relative-interior point of facet ``i`` toward the centroid, for
        ``t = 1e-1 ... 1e-6``; it must decrease monotonically.
        """
        poly = self.polytope
        lo, hi = poly.bounding_box()
        ticks = [lo[k] + (np.arange(resolution) + 0.5) / resolution * (hi[k] - lo[k])
                 for k in range(self.dim)]
        grid = np.stack(np.meshgrid(*ticks, indexing="ij"), -1).reshape(-1, self.dim)
        grid = grid[np.all(poly.l(grid) > 1e-12, axis=1)]
        eig = np.linalg.eigvalsh(self.hess(grid))
        min_eig = float(eig.min())

        kernel_ok, kernel_norms = [], []
        ts = 10.0 ** -np.arange(1, 7)
        for i in range(poly.n_facets):
            p = poly.facet_point(i)
            pts = p + ts[:, None] * (poly.centroid - p)
            try:
                vals = np.linalg.norm(np.linalg.solve(self.hess(pts), self._U[i]), axis=-1)
            except np.linalg.LinAlgError:
                vals = np.full(len(ts), np.nan)
            kernel_norms.append(vals.tolist())
            kernel_ok.append(bool(np.all(np.isfinite(vals)) and np.all(np.diff(vals) < 0)))
        return ValidationReport(min_eig > 0, min_eig, kernel_ok, kernel_norms)

    def to_dict(self) -> dict:
        out = self.polytope.to_dict() if hasattr(self.polytope, "to_dict") else {}
        if self.perturbation is not None:
            out["perturbation"] = self.perturbation.to_list()
        return out


def standard_perturbation(dim: int) -> Polynomial:
    """Cubic perturbation used across the standard suite (small enough to keep ``hess g > 0``)."""
    if dim == 1:
        return Polynomial([((3,), 0.05)])
    exps = [[0] * dim, [0] * dim]
    exps[0][0] = 3
    exps[1][0], exps[1][1] = 1, 2
    return Polynomial([(exps[0], 0.05), (exps[1], 0.05)])


def standard_potentials() -> dict[str, SymplecticPotential]:
    """Canonical and perturbed potentials on every standard polytope.

    Keys are ``"<polytope>"`` for the canonical potential and
    ``"<polytope>+cubic"`` for the perturbed one.
    """
    from .polytope import standard_polytopes

    out = {}
    for name, poly in standard_polytopes().items():
        out[name] = SymplecticPotential(poly)
        out[f"{name}+cubic"] = SymplecticPotential(poly, standard_perturbation(poly.dim))
    return out
