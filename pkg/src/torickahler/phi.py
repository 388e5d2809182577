"""The two-point function ``phi(x, y) = g(y) + (x - y).g_y(y)``.

For a weight ``x = m/N`` the section ``e^{m.z}`` has squared norm
``exp(2N phi(x, y))`` at moment coordinate ``y``.  The canonical part of
``g`` is always evaluated in the form ``sum_i l_i(x) log l_i(y) - l_i(y)``,
which stays finite for ``x`` on the boundary.
"""

from __future__ import annotations

import numpy as np

from .errors import BoundaryError, ConvergenceError
from .potential import SymplecticPotential

__all__ = ["PhiEvaluator", "lemma_suite"]


class PhiEvaluator:
    """Evaluate ``phi`` and its ``y``-derivatives for a fixed potential."""

    def __init__(self, potential: SymplecticPotential):
        self.potential = potential
        self.polytope = potential.polytope
        self._tol = 1e-12 * max(1.0, float(np.abs(self.polytope.offsets).max()))

    def _lx(self, x) -> np.ndarray:
        lx = self.polytope.l(x)
        if np.any(lx < -self._tol):
            raise BoundaryError("weight x lies outside the polytope")
        return np.maximum(lx, 0.0)

    def _smooth(self, x, y):
        pert = self.potential.perturbation
        if pert is None:
            return 0.0
        return pert(y) + np.sum((np.asarray(x) - y) * pert.grad(y), axis=-1)

    def phi(self, x, y):
        """``phi(x, y)`` for ``x`` in the closed polytope and interior ``y``.

        Broadcasts over leading axes of ``x`` and ``y``.
        """
        lx = self._lx(x)
        ly = self.potential._l(y)
        return np.sum(lx * np.log(ly) - ly, axis=-1) + self._smooth(x, y)

    def phi_self(self, x):
        """``phi(x, x) = g(x)``, extended to boundary ``x`` with ``0 log 0 = 0``."""
        lx = self._lx(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xlogx = np.where(lx > 0, lx * np.log(np.where(lx > 0, lx, 1.0)), 0.0)
        pert = self.potential.perturbation
        extra = pert(x) if pert is not None else 0.0
        return np.sum(xlogx - lx, axis=-1) + extra

    def grad_y(self, x, y):
        """``d phi / dy = hess(g)(y) (x - y)``."""
        self._lx(x)
        diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return np.einsum("...ab,...b->...a", self.potential.hess(y), diff)

    def hess_y(self, x, y):
        """Second ``y``-derivative: ``D^3 g(y)[x - y] - hess(g)(y)``."""
        diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return (np.einsum("...abc,...c->...ab", self.potential.deriv3(y), diff)
                - self.potential.hess(y))

    def _on_facet(self, i, p, name):
        l = self.polytope.l(p)
        others = np.delete(l, i, axis=-1)
        if np.any(np.abs(l[..., i]) > 1e-9) or np.any(others <= 1e-12):
            raise BoundaryError(f"{name} is not in the relative interior of facet {i}")
        l = np.array(l, dtype=float)
        l[..., i] = 0.0
        return l

    def phi_facet(self, i: int, x, y):
        """``phi`` restricted to facet ``i``, both points in its relative interior.

        Terms with ``l_i(x) = l_i(y) = 0`` contribute nothing.
        """
        if not 0 <= i < self.polytope.n_facets:
            raise IndexError(f"facet index {i} out of range")
        lx = self._on_facet(i, x, "x")
        ly = self._on_facet(i, y, "y")
        ly_safe = np.where(ly > 0, ly, 1.0)
        body = np.where(lx > 0, lx * np.log(ly_safe), 0.0) - ly
        return np.sum(body, axis=-1) + self._smooth(x, y)

    def argmax(self, x, start=None, tol: float = 1e-13, max_iter: int = 200) -> np.ndarray:
        """Maximizer of ``phi(x, .)`` by Newton iteration on ``grad_y``.

        The full Newton step is used whenever the ``y``-Hessian is negative
        definite; otherwise the step ``G^{-1} grad_y = x - y`` (always an
        ascent direction) is taken.  Steps are halved to stay interior and
        not decrease ``phi``.
        """
        x = np.asarray(x, dtype=float)
        if not self.polytope.is_interior(x):
            raise BoundaryError("argmax needs an interior weight x")
        y = np.array(self.polytope.centroid if start is None else start, dtype=float)
        val = self.phi(x, y)
        for _ in range(max_iter):
            grad = self.grad_y(x, y)
            h = self.hess_y(x, y)
            try:
                np.linalg.cholesky(-h)
                step = -np.linalg.solve(h, grad)
            except np.linalg.LinAlgError:
                step = x - y
            t = 1.0
            while True:
                trial = y + t * step
                if self.polytope.is_interior(trial):
                    trial_val = self.phi(x, trial)
                    if trial_val >= val - 1e-14 * (1.0 + abs(val)):
                        break
                t *= 0.5
                if t < 1e-30:
                    raise ConvergenceError("phi argmax line search failed")
            y, val = trial, trial_val
            if np.linalg.norm(t * step) <= tol * (1.0 + np.linalg.norm(y)):
                return y
        raise ConvergenceError(f"phi argmax did not converge in {max_iter} iterations")

    def alpha(self, y) -> np.ndarray:
        """``g0_y^{-1}(g_y(y))``: moment coordinate of the same orbit for the canonical metric."""
        u = self.potential.grad(y)
        return self.potential.canonical.legendre_inverse(u)


def _interior_samples(poly, count, rng, shrink=0.8):
    v = poly.vertices
    w = rng.dirichlet(np.ones(len(v)), size=count)
    c = poly.centroid
    return c + shrink * (w @ v - c)


def _facet_samples(poly, i, count, rng, shrink=0.8):
    v = poly.facet_vertices(i)
    c = v.mean(axis=0)
    w = rng.dirichlet(np.ones(len(v)), size=count)
    return c + shrink * (w @ v - c)


def _grid(poly, per_axis):
    lo, hi = poly.bounding_box()
    ticks = [lo[k] + (np.arange(per_axis) + 0.5) / per_axis * (hi[k] - lo[k])
             for k in range(poly.dim)]
    pts = np.stack(np.meshgrid(*ticks, indexing="ij"), -1).reshape(-1, poly.dim)
    spacing = (hi - lo) / per_axis
    return pts[poly.is_interior(pts)], spacing


def _facet_grid(poly, i, resolution):
    """Lattice of points in the relative interior of facet ``i`` and its spacing."""
    v = poly.facet_vertices(i)
    n = poly.dim
    if n == 1:
        return v.copy(), 0.0
    if n == 2:
        t = (np.arange(resolution) + 0.5) / resolution
        pts = v[0] + t[:, None] * (v[1] - v[0])
        return pts, float(np.linalg.norm(v[1] - v[0])) / resolution
    # n == 3: fan lattice over the facet polygon ordered by angle
    c = v.mean(axis=0)
    u = poly.normals[i] / np.linalg.norm(poly.normals[i])
    e1 = v[0] - c
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    order = np.argsort(np.arctan2((v - c) @ e2, (v - c) @ e1))
    v = v[order]
    r = resolution
    a, b = np.meshgrid(np.arange(r + 1), np.arange(r + 1), indexing="ij")
    keep = a + b <= r
    a, b = a[keep] / r, b[keep] / r
    pts = []
    for j in range(len(v)):
        p, q = v[j], v[(j + 1) % len(v)]
        pts.append(c + a[:, None] * (p - c) + b[:, None] * (q - c))
    pts = np.unique(np.round(np.concatenate(pts), 14), axis=0)
    l = poly.l(pts)
    inner = np.all(np.delete(l, i, axis=1) > 1e-12, axis=1)
    spacing = max(np.linalg.norm(p - c) for p in v) / r
    return pts[inner], spacing


def lemma_suite(potential: SymplecticPotential, n_samples: int = 20, seed: int = 0,
                grid_points: int = 10_000, n_starts: int = 5,
                normal_threshold: float = 0.1) -> dict:
    """Numerical checks of the qualitative properties of ``phi``.

    ``interior_maximum``
        For interior ``x``, Newton from the centroid and from ``n_starts``
        random interior points converges to ``x``; on a grid of about
        ``grid_points`` interior points, ``phi(x, .)`` is strictly below
        ``phi(x, x)`` and its grid argmax is within one grid cell of ``x``.
    ``facet_maximum``
        For ``x`` in the relative interior of a facet ``F``, the restriction
        of ``phi(x, .)`` to a lattice on ``F`` is strictly below its value
        at ``x`` with lattice argmax next to ``x``; the one-sided derivative
        along the inward normal at ``y = x`` has magnitude above
        ``normal_threshold``.
    ``alpha_boundary``
        Along segments ``y_t`` approaching a facet point, ``alpha(y_t)``
        approaches the same facet (``l_F(alpha(y_t))`` decreases to 0).  In
        dimension one, where facets are points, ``|alpha(y_t) - y_t| -> 0``
        is required as well.  The identity defect is reported in every
        dimension.

    Returns a JSON-ready dict with per-sample records and a ``passed`` flag
    for each check.
    """
    poly = potential.polytope
    ev = PhiEvaluator(potential)
    rng = np.random.default_rng(seed)
    n = poly.dim
    per_axis = max(2, int(round(grid_points ** (1.0 / n))))
    grid, spacing = _grid(poly, per_axis)

    interior = []
    for x in _interior_samples(poly, n_samples, rng):
        starts = [poly.centroid] + list(_interior_samples(poly, n_starts, rng, shrink=0.95))
        newton_err = max(float(np.linalg.norm(ev.argmax(x, start=s) - x)) for s in starts)
        vals = ev.phi(x, grid)
        top = ev.phi_self(x)
        far = np.linalg.norm(grid - x, axis=1) > 1e-12
        best = grid[np.argmax(vals)]
        near = bool(np.all(np.abs(best - x) <= spacing * (1 + 1e-9)))
        strict = bool(np.all(vals[far] < top))
        ok = newton_err < 1e-8 and near and strict
        interior.append({"x": x.tolist(), "newton_error": newton_err,
                         "grid_argmax_adjacent": near, "strict_maximum": strict, "passed": ok})

    facet = []
    for k in range(n_samples):
        i = k % poly.n_facets
        x = _facet_samples(poly, i, 1, rng)[0]
        fgrid, fspacing = _facet_grid(poly, i, 2000 if n == 2 else 60)
        top = float(ev.phi_facet(i, x, x)) if n > 1 else float(ev.phi_self(x))
        if n > 1:
            fvals = ev.phi_facet(i, x, fgrid)
            far = np.linalg.norm(fgrid - x, axis=1) > 1e-12
            strict = bool(np.all(fvals[far] < top))
            best = fgrid[np.argmax(fvals)]
            near = bool(np.linalg.norm(best - x) <= 1.5 * fspacing + 1e-12)
        else:
            strict = near = True
        inward = -poly.normals[i] / np.linalg.norm(poly.normals[i])
        t = 1e-7
        dnormal = float((ev.phi(x, x + t * inward) - top) / t)
        ok = strict and near and abs(dnormal) > normal_threshold
        facet.append({"facet": i, "x": x.tolist(), "strict_maximum": strict,
                      "grid_argmax_adjacent": near, "normal_derivative": dnormal, "passed": ok})

    alpha = []
    ts = 10.0 ** -np.arange(1, 6)
    for k in range(n_samples):
        i = k % poly.n_facets
        p = _facet_samples(poly, i, 1, rng)[0]
        ys = p + ts[:, None] * (poly.centroid - p)
        a = np.array([ev.alpha(y) for y in ys])
        gap = poly.l(a)[:, i]
        defect = np.linalg.norm(a - ys, axis=1)
        ok = bool(np.all(np.diff(gap) < 0) and gap[-1] <= 1e-2 * gap[0] and gap[-1] >= -1e-12)
        if n == 1:
            ok = ok and bool(defect[-1] <= max(1e-8, 1e-2 * defect[0]))
        alpha.append({"facet": i, "facet_point": p.tolist(), "boundary_gap": gap.tolist(),
                      "identity_defect": defect.tolist(), "passed": ok})

    out = {}
    for name, recs in (("interior_maximum", interior), ("facet_maximum", facet),
                       ("alpha_boundary", alpha)):
        out[name] = {"passed": all(r["passed"] for r in recs), "samples": recs}
    return out
