"""Adaptive cubature over convex polytopes and facet (h-derivative) integrals.

The bounding box is split into a uniform grid of cells.  Cells inside the
polytope get a tensor Gauss-Legendre rule; cells cut by the boundary are
clipped to the polytope exactly, triangulated, and integrated with conical
Gauss-Jacobi simplex rules.  Each cell carries the difference between a
high- and a low-order rule as its error estimate, and the cells with the
largest errors are bisected along every axis until the requested tolerance
is met or the depth limit is reached.

Integrands are vectorized: ``f(Y)`` with ``Y`` of shape ``(k, n)`` returns
shape ``(k,)``.  All nodes lie strictly inside the polytope.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy.spatial import Delaunay, QhullError
from scipy.special import roots_jacobi, roots_legendre

from .numerics import richardson_extrapolate
from .polytope import Polytope

__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "QuadratureWarning",
    "PolytopeIntegrator",
    "integrate",
    "facet_integral",
]

_DEFAULT_CELLS = {1: 32, 2: 24, 3: 10}
_DEFAULT_RTOL = {1: 1e-8, 2: 1e-6, 3: 1e-5}


class QuadratureWarning(UserWarning):
    """Tolerance not reached before the depth limit."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Cubature parameters; ``None`` picks a dimension-dependent default.

    Defaults are 32/24/10 base cells per axis and relative tolerance
    1e-8/1e-6/1e-5 in dimension 1/2/3.
    """

    base_cells: int | None = None
    max_depth: int = 6
    rtol: float | None = None
    atol: float = 0.0
    order: int = 8
    low_order: int = 5

    def __post_init__(self):
        if self.rtol is not None and not self.rtol > 0:
            raise ValueError("rtol must be positive")
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        if self.base_cells is not None and self.base_cells < 1:
            raise ValueError("base_cells must be positive")
        if not self.order > self.low_order >= 1:
            raise ValueError("need order > low_order >= 1")

    def resolved(self, dim: int) -> QuadratureSpec:
        return replace(
            self,
            base_cells=self.base_cells or _DEFAULT_CELLS.get(dim, 8),
            rtol=self.rtol or _DEFAULT_RTOL.get(dim, 1e-4),
        )


class QuadratureResult(NamedTuple):
    value: float
    error: float


@lru_cache(maxsize=None)
def _box_rule(n: int, p: int):
    x, w = roots_legendre(p)
    x, w = (x + 1) / 2, w / 2
    nodes = np.stack(np.meshgrid(*([x] * n), indexing="ij"), -1).reshape(-1, n)
    weights = np.prod(np.stack(np.meshgrid(*([w] * n), indexing="ij"), -1).reshape(-1, n), axis=1)
    return nodes, weights


@lru_cache(maxsize=None)
def _simplex_rule(n: int, p: int):
    """Conical product rule on ``{x >= 0, sum x <= 1}`` (Duffy collapse)."""
    axes = []
    for k in range(n):
        a = n - 1 - k
        x, w = roots_jacobi(p, a, 0) if a else roots_legendre(p)
        axes.append(((x + 1) / 2, w / 2 ** (a + 1)))
    t = np.stack(np.meshgrid(*[a[0] for a in axes], indexing="ij"), -1).reshape(-1, n)
    w = np.prod(np.stack(np.meshgrid(*[a[1] for a in axes], indexing="ij"), -1).reshape(-1, n),
                axis=1)
    x = np.empty_like(t)
    rest = np.ones(len(t))
    for k in range(n):
        x[:, k] = rest * t[:, k]
        rest = rest * (1 - t[:, k])
    return x, w


class _Cells:
    """Flat arrays describing a batch of leaf cells."""

    def __init__(self, lo, width, depth):
        self.lo = lo
        self.width = width
        self.depth = depth


class PolytopeIntegrator:
    """Reusable adaptive integrator for one polytope.

    Clipping of boundary cells depends only on the geometry, so it is cached
    and shared by every integrand passed to :meth:`integrate`.
    """

    def __init__(self, poly: Polytope, spec: QuadratureSpec | None = None):
        self.poly = poly
        self.spec = (spec or QuadratureSpec()).resolved(poly.dim)
        self.dim = poly.dim
        n = self.dim
        self._corners = np.array(list(itertools.product((0.0, 1.0), repeat=n)))
        lo, hi = poly.bounding_box()
        self._lo, self._hi = lo, hi
        self._clip_cache: dict = {}
        box_planes = np.vstack([np.eye(n), -np.eye(n)])
        self._planes = np.vstack([poly.normals, box_planes])
        self._combos = np.array(list(itertools.combinations(range(len(self._planes)), n)))
        dets = np.linalg.det(self._planes[self._combos])
        self._combos = self._combos[np.abs(dets) > 1e-12]
        self._scale = max(1.0, float(np.abs(hi - lo).max()), float(np.abs(poly.offsets).max()))

    def _base(self) -> _Cells:
        k = self.spec.base_cells
        width = (self._hi - self._lo) / k
        idx = np.stack(np.meshgrid(*([np.arange(k)] * self.dim), indexing="ij"), -1)
        idx = idx.reshape(-1, self.dim)
        lo = self._lo + idx * width
        return _Cells(lo, np.broadcast_to(width, lo.shape).copy(), np.zeros(len(lo), dtype=int))

    def _classify(self, cells: _Cells):
        corners = cells.lo[:, None, :] + cells.width[:, None, :] * self._corners
        l = self.poly.l(corners)  # (k, 2^n, d)
        tol = 1e-13 * self._scale
        inside = np.all(l >= -tol, axis=(1, 2))
        outside = np.any(np.all(l <= tol, axis=1), axis=1)
        return inside, ~inside & ~outside

    def _clip(self, lo, width) -> np.ndarray:
        """Simplices ``(s, n+1, n)`` triangulating ``box \\cap polytope``."""
        key = (tuple(np.round(lo / self._scale, 15)), tuple(np.round(width / self._scale, 15)))
        hit = self._clip_cache.get(key)
        if hit is not None:
            return hit
        n = self.dim
        hi = lo + width
        b = np.concatenate([self.poly.offsets, hi, -lo])
        if n == 1:
            a_lo = max(lo[0], *(b[j] / self._planes[j, 0] for j in range(len(b))
                                if self._planes[j, 0] < 0))
            a_hi = min(hi[0], *(b[j] / self._planes[j, 0] for j in range(len(b))
                                if self._planes[j, 0] > 0))
            out = (np.array([[[a_lo], [a_hi]]]) if a_hi > a_lo
                   else np.empty((0, 2, 1)))
        else:
            a = self._planes[self._combos]
            rhs = b[self._combos]
            verts = np.linalg.solve(a, rhs[..., None])[..., 0]
            ok = np.all(verts @ self._planes.T - b <= 1e-12 * self._scale, axis=1)
            verts = verts[ok]
            if len(verts):
                verts = np.unique(np.round(verts, 13), axis=0)
            out = np.empty((0, n + 1, n))
            if len(verts) > n:
                try:
                    tri = Delaunay(verts)
                    simp = verts[tri.simplices]
                    vol = np.abs(np.linalg.det(simp[:, 1:] - simp[:, :1]))
                    out = simp[vol > 1e-14 * np.prod(width)]
                except QhullError:
                    pass
        self._clip_cache[key] = out
        return out

    def _estimate(self, f, cells: _Cells, cut: np.ndarray):
        """High-order value and error estimate for every cell."""
        n = self.dim
        spec = self.spec
        bh_nodes, bh_w = _box_rule(n, spec.order)
        bl_nodes, bl_w = _box_rule(n, spec.low_order)
        sh_nodes, sh_w = _simplex_rule(n, spec.order)
        sl_nodes, sl_w = _simplex_rule(n, spec.low_order)

        boxes = np.flatnonzero(~cut)
        pts, owner, wts, which = [], [], [], []
        for nodes, w, tag in ((bh_nodes, bh_w, 0), (bl_nodes, bl_w, 1)):
            lo = cells.lo[boxes][:, None, :]
            width = cells.width[boxes][:, None, :]
            pts.append((lo + width * nodes).reshape(-1, n))
            vol = np.prod(cells.width[boxes], axis=1)
            wts.append((vol[:, None] * w).reshape(-1))
            owner.append(np.repeat(boxes, len(w)))
            which.append(np.full(len(boxes) * len(w), tag))
        for c in np.flatnonzero(cut):
            simp = self._clip(cells.lo[c], cells.width[c])
            if not len(simp):
                continue
            base = simp[:, 0, :]
            edges = simp[:, 1:, :] - base[:, None, :]
            vol = np.abs(np.linalg.det(edges))
            for nodes, w, tag in ((sh_nodes, sh_w, 0), (sl_nodes, sl_w, 1)):
                p = base[:, None, :] + np.einsum("qk,skn->sqn", nodes, edges)
                pts.append(p.reshape(-1, n))
                wts.append((vol[:, None] * w).reshape(-1))
                owner.append(np.full(p.shape[0] * p.shape[1], c))
                which.append(np.full(p.shape[0] * p.shape[1], tag))
        k = len(cells.lo)
        if not pts:
            return np.zeros(k), np.zeros(k)
        pts = np.concatenate(pts)
        wts = np.concatenate(wts)
        owner = np.concatenate(owner)
        which = np.concatenate(which)
        vals = np.asarray(f(pts), dtype=float).reshape(-1) * wts
        high = np.bincount(owner[which == 0], vals[which == 0], minlength=k)
        low = np.bincount(owner[which == 1], vals[which == 1], minlength=k)
        return high, np.abs(high - low)

    def _split(self, cells: _Cells, sel: np.ndarray) -> _Cells:
        half = cells.width[sel] / 2
        lo = (cells.lo[sel][:, None, :] + half[:, None, :] * self._corners).reshape(-1, self.dim)
        width = np.repeat(half, len(self._corners), axis=0)
        depth = np.repeat(cells.depth[sel] + 1, len(self._corners))
        return _Cells(lo, width, depth)

    def integrate(self, f: Callable, rtol: float | None = None,
                  atol: float | None = None) -> QuadratureResult:
        """Integrate ``f`` over the polytope.

        Refinement stops once the summed error estimate is below
        ``max(atol, rtol |value|)``.  If the depth limit is hit first a
        :class:`QuadratureWarning` is emitted and the returned error
        estimate exceeds the tolerance.
        """
        rtol = self.spec.rtol if rtol is None else rtol
        atol = self.spec.atol if atol is None else atol
        fresh = self._base()
        inside, cut = self._classify(fresh)
        keep = inside | cut
        fresh = _Cells(fresh.lo[keep], fresh.width[keep], fresh.depth[keep])
        cut = cut[keep]
        leaf_val = np.empty(0)
        leaf_err = np.empty(0)
        leaf = _Cells(np.empty((0, self.dim)), np.empty((0, self.dim)), np.empty(0, dtype=int))
        while True:
            val, err = self._estimate(f, fresh, cut)
            leaf = _Cells(np.concatenate([leaf.lo, fresh.lo]),
                          np.concatenate([leaf.width, fresh.width]),
                          np.concatenate([leaf.depth, fresh.depth]))
            leaf_val = np.concatenate([leaf_val, val])
            leaf_err = np.concatenate([leaf_err, err])
            total = float(np.sum(leaf_val))
            error = float(np.sum(leaf_err))
            target = max(atol, rtol * abs(total))
            if error <= target:
                return QuadratureResult(total, error)
            refinable = leaf.depth < self.spec.max_depth
            if not np.any(refinable & (leaf_err > 0)):
                warnings.warn(f"quadrature tolerance {target:.3g} not met, error {error:.3g}",
                              QuadratureWarning, stacklevel=2)
                return QuadratureResult(total, error)
            order = np.argsort(-np.where(refinable, leaf_err, -1.0), kind="stable")
            order = order[refinable[order]]
            remaining = error - np.cumsum(leaf_err[order])
            count = int(np.searchsorted(-remaining, -0.5 * target)) + 1
            sel = np.zeros(len(leaf_val), dtype=bool)
            sel[order[:count]] = True
            fresh = self._split(leaf, sel)
            inside, cut = self._classify(fresh)
            keep = inside | cut
            fresh = _Cells(fresh.lo[keep], fresh.width[keep], fresh.depth[keep])
            cut = cut[keep]
            stay = ~sel
            leaf = _Cells(leaf.lo[stay], leaf.width[stay], leaf.depth[stay])
            leaf_val = leaf_val[stay]
            leaf_err = leaf_err[stay]


def integrate(poly: Polytope, f: Callable, spec: QuadratureSpec | None = None) -> QuadratureResult:
    """One-shot adaptive integral of ``f`` over ``poly``; returns ``(value, error)``."""
    return PolytopeIntegrator(poly, spec).integrate(f)


def slab(poly: Polytope, i: int, eps: float) -> Polytope:
    """``Delta_h \\setminus Delta`` for ``h = eps e_i``: the layer added by pushing facet ``i`` out."""
    normals = np.vstack([poly.normals, -poly.normals[i]])
    offsets = np.concatenate([poly.offsets, [-poly.offsets[i]]])
    offsets[i] += eps
    return Polytope(normals, offsets)


def facet_integral(poly: Polytope, i: int, f: Callable, spec: QuadratureSpec | None = None,
                   eps=(1e-2, 5e-3, 2.5e-3)) -> float:
    """``d/dh_i`` of ``int_{Delta_h} f`` at ``h = 0``.

    Each one-sided difference quotient is the integral over the added
    layer divided by its thickness, so no subtraction of nearly equal
    integrals occurs; the quotients are Richardson-extrapolated.  This is
    the integral of ``f`` over facet ``i`` in the measure that makes every
    lattice facet of a Delzant polytope have integer volume.
    """
    if not 0 <= i < poly.n_facets:
        raise IndexError(f"facet index {i} out of range")
    quotients = [integrate(slab(poly, i, e), f, spec).value / e for e in eps]
    ratios = {round(eps[k] / eps[k + 1], 12) for k in range(len(eps) - 1)}
    if len(ratios) != 1:
        raise ValueError("eps must form a geometric sequence")
    return richardson_extrapolate(quotients, p=1, r=ratios.pop())
