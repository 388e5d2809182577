"""Delzant polytopes in half-space form, their lattice points and dilations.

A polytope is stored as ``{y : y.u_i - c_i <= 0}`` with the affine defining
functions ``l_i(y) = c_i - y.u_i`` positive on the interior.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from .errors import DelzantError, EmptyPolytopeError, PolytopeError

__all__ = [
    "Facet",
    "Polytope",
    "DelzantPolytope",
    "LatticeSet",
    "dilate",
    "interval",
    "simplex",
    "rectangle",
    "square",
    "hirzebruch",
    "standard_polytopes",
]


@dataclass(frozen=True)
class Facet:
    """Primitive outward integer normal ``u`` and integer offset ``c``."""

    normal: tuple[int, ...]
    offset: int

    def __post_init__(self):
        normal = tuple(int(v) for v in self.normal)
        if any(int(v) != v for v in self.normal) or int(self.offset) != self.offset:
            raise PolytopeError(f"facet data must be integers, got {self.normal}, {self.offset}")
        if all(v == 0 for v in normal):
            raise PolytopeError("facet normal is zero")
        if math.gcd(*normal) != 1:
            raise PolytopeError(f"facet normal {normal} is not primitive")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", int(self.offset))


@dataclass(frozen=True)
class LatticeSet:
    """Integer points ``m`` with ``N c_i - m.u_i >= 0`` for every facet."""

    scale: int
    points: np.ndarray

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def weights(self) -> np.ndarray:
        """The rescaled points ``m / N``."""
        return self.points / self.scale


def chebyshev_center(normals, offsets):
    """Center and radius of the largest ball inside ``{y : U y <= c}``.

    Returns ``(None, 0.0)`` for an empty set and raises for an unbounded one.
    """
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    d, n = normals.shape
    norms = np.linalg.norm(normals, axis=1)
    a_ub = np.hstack([normals, norms[:, None]])
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    bounds = [(None, None)] * n + [(0, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=offsets, bounds=bounds, method="highs")
    if res.status == 3:
        raise PolytopeError("polytope is unbounded")
    if res.status != 0:
        return None, 0.0
    return res.x[:n], float(res.x[-1])


def _is_bounded(normals) -> bool:
    n = normals.shape[1]
    for k, sign in itertools.product(range(n), (1.0, -1.0)):
        cost = np.zeros(n)
        cost[k] = -sign
        res = linprog(cost, A_ub=normals, b_ub=np.zeros(len(normals)),
                      bounds=[(-1, 1)] * n, method="highs")
        if res.status != 0 or -res.fun > 1e-9:
            return False
    return True


class Polytope:
    """Bounded convex polytope ``{y : y.u_i - c_i <= 0}`` with real offsets.

    This is the general, unchecked state used for dilations and for the thin
    slabs that appear in facet integrals.  Use :class:`DelzantPolytope` for
    polytopes carrying a toric structure.
    """

    def __init__(self, normals, offsets):
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        offsets = np.asarray(offsets, dtype=float).reshape(-1)
        if normals.shape[0] != offsets.shape[0]:
            raise PolytopeError("normals and offsets have different lengths")
        normals.setflags(write=False)
        offsets.setflags(write=False)
        self.normals = normals
        self.offsets = offsets
        if not _is_bounded(normals):
            raise PolytopeError("polytope is unbounded")
        center, radius = chebyshev_center(normals, offsets)
        if center is None or radius <= 1e-12:
            raise EmptyPolytopeError("polytope has empty interior")
        self._center = center

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def n_facets(self) -> int:
        return self.normals.shape[0]

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, n_facets={self.n_facets})"

    def l(self, y) -> np.ndarray:
        """All defining functions ``l_i(y) = c_i - y.u_i``, shape ``(..., d)``."""
        y = np.asarray(y, dtype=float)
        return self.offsets - y @ self.normals.T

    def l_eval(self, i: int, y) -> float | np.ndarray:
        """Single defining function ``l_i(y)``."""
        if not 0 <= i < self.n_facets:
            raise IndexError(f"facet index {i} out of range 0..{self.n_facets - 1}")
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.dim:
            raise ValueError(f"point has dimension {y.shape[-1]}, expected {self.dim}")
        return self.offsets[i] - y @ self.normals[i]

    @cached_property
    def vertices(self) -> np.ndarray:
        n = self.dim
        scale = max(1.0, float(np.abs(self.offsets).max()))
        found = []
        for idx in itertools.combinations(range(self.n_facets), n):
            a = self.normals[list(idx)]
            if abs(np.linalg.det(a)) < 1e-12:
                continue
            v = np.linalg.solve(a, self.offsets[list(idx)])
            if np.all(self.l(v) >= -1e-9 * scale):
                if not any(np.allclose(v, w, atol=1e-9 * scale) for w in found):
                    found.append(v)
        return np.array(found)

    @cached_property
    def centroid(self) -> np.ndarray:
        """Vertex average; an interior point of any full-dimensional polytope."""
        return self.vertices.mean(axis=0)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vertices
        return v.min(axis=0), v.max(axis=0)

    def contains(self, y, tol: float = 0.0) -> np.ndarray:
        return np.all(self.l(y) >= -tol, axis=-1)

    def is_interior(self, y) -> np.ndarray:
        return np.all(self.l(y) > 0, axis=-1)

    def facet_vertices(self, i: int) -> np.ndarray:
        """Vertices lying on facet ``i``."""
        scale = max(1.0, float(np.abs(self.offsets).max()))
        v = self.vertices
        return v[np.abs(self.l(v)[:, i]) <= 1e-9 * scale]

    def facet_point(self, i: int) -> np.ndarray:
        """A point in the relative interior of facet ``i`` (its vertex average)."""
        return self.facet_vertices(i).mean(axis=0)

    def with_offsets(self, offsets) -> Polytope:
        return Polytope(self.normals, offsets)


def _solve_exact(a: list[list[int]], b: list[int]) -> tuple[Fraction, ...] | None:
    """Gaussian elimination over the rationals; None for a singular system."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(m[i][n] / m[i][i] for i in range(n))


class DelzantPolytope(Polytope):
    """Lattice polytope with primitive normals, unimodular at every vertex.

    Parameters
    ----------
    facets : sequence of Facet or (normal, offset) pairs
        Facet data; normals must be primitive integer vectors and offsets
        integers.

    Raises
    ------
    PolytopeError
        Malformed facet data or an unbounded region.
    EmptyPolytopeError
        No interior point.
    DelzantError
        Some vertex is not on exactly ``n`` facets or its normals have
        ``|det| != 1``.
    """

    def __init__(self, facets):
        facets = tuple(f if isinstance(f, Facet) else Facet(*f) for f in facets)
        if not facets:
            raise PolytopeError("no facets given")
        dims = {len(f.normal) for f in facets}
        if len(dims) != 1:
            raise PolytopeError(f"facet normals have inconsistent dimensions {sorted(dims)}")
        self.facets = facets
        super().__init__([f.normal for f in facets], [f.offset for f in facets])
        self.exact_vertices  # runs the Delzant check

    @cached_property
    def exact_vertices(self) -> list[tuple[Fraction, ...]]:
        n = self.dim
        normals = [f.normal for f in self.facets]
        offsets = [f.offset for f in self.facets]
        found = []
        for idx in itertools.combinations(range(len(self.facets)), n):
            a = [list(normals[i]) for i in idx]
            v = _solve_exact(a, [offsets[i] for i in idx])
            if v is None or v in found:
                continue
            ls = [c - sum(ui * vi for ui, vi in zip(u, v)) for u, c in zip(normals, offsets)]
            if all(x >= 0 for x in ls):
                found.append(v)
        for v in found:
            ls = [c - sum(ui * vi for ui, vi in zip(u, v)) for u, c in zip(normals, offsets)]
            active = [i for i, x in enumerate(ls) if x == 0]
            label = "(" + ", ".join(str(x) for x in v) + ")"
            if len(active) != n:
                raise DelzantError(
                    f"vertex {label} lies on {len(active)} facets, expected {n}", vertex=v)
            det = round(np.linalg.det(np.array([normals[i] for i in active], dtype=float)))
            if abs(det) != 1:
                raise DelzantError(
                    f"vertex {label} has normal determinant {det}, expected +-1", vertex=v)
        return found

    @cached_property
    def vertices(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.exact_vertices])

    def lattice_points(self, N: int) -> LatticeSet:
        """Enumerate ``Z^n \\cap N Delta`` with exact integer containment."""
        if int(N) != N or N < 1:
            raise ValueError(f"N must be a positive integer, got {N}")
        N = int(N)
        lo = [math.floor(min(v[k] for v in self.exact_vertices) * N) for k in range(self.dim)]
        hi = [math.ceil(max(v[k] for v in self.exact_vertices) * N) for k in range(self.dim)]
        axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        normals = np.array([f.normal for f in self.facets], dtype=np.int64)
        offsets = np.array([f.offset for f in self.facets], dtype=np.int64)
        keep = np.all(N * offsets - grid @ normals.T >= 0, axis=1)
        return LatticeSet(N, grid[keep])

    def to_dict(self) -> dict:
        return {"dim": self.dim,
                "facets": [{"normal": list(f.normal), "offset": f.offset} for f in self.facets]}

    @classmethod
    def from_dict(cls, data: dict) -> DelzantPolytope:
        """Build from ``{"dim": n, "facets": [{"normal": [..], "offset": c}, ...]}``."""
        try:
            dim = int(data["dim"])
            raw = data["facets"]
        except (KeyError, TypeError, ValueError) as exc:
            raise PolytopeError(f"polytope description needs 'dim' and 'facets': {exc}") from None
        facets = []
        for k, f in enumerate(raw):
            try:
                normal, offset = f["normal"], f["offset"]
            except (KeyError, TypeError):
                raise PolytopeError(f"facet {k}: needs 'normal' and 'offset'") from None
            if len(normal) != dim:
                raise PolytopeError(f"facet {k}: normal has length {len(normal)}, dim is {dim}")
            try:
                facets.append(Facet(tuple(normal), offset))
            except PolytopeError as exc:
                raise PolytopeError(f"facet {k}: {exc}") from None
        return cls(facets)


def dilate(poly: Polytope, h) -> Polytope:
    """The dilated polytope ``{y : y.u_i - c_i <= h_i}`` (no Delzant check)."""
    h = np.asarray(h, dtype=float).reshape(-1)
    if h.shape[0] != poly.n_facets:
        raise ValueError(f"need {poly.n_facets} dilation values, got {h.shape[0]}")
    if not np.any(h):
        return poly
    try:
        return Polytope(poly.normals, poly.offsets + h)
    except EmptyPolytopeError:
        raise EmptyPolytopeError(f"dilation by {h.tolist()} leaves no interior") from None


def _positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def interval(lam: int = 1) -> DelzantPolytope:
    """``[0, lam]``, the moment polytope of CP^1."""
    _positive(lam=lam)
    return DelzantPolytope([((-1,), 0), ((1,), lam)])


def simplex(n: int = 2, size: int = 1) -> DelzantPolytope:
    """``{y_k >= 0, sum y <= size}``, the moment polytope of CP^n."""
    _positive(n=n, size=size)
    facets = [(tuple(-1 if j == k else 0 for j in range(n)), 0) for k in range(n)]
    facets.append(((1,) * n, size))
    return DelzantPolytope(facets)


def rectangle(a: int = 1, b: int = 1) -> DelzantPolytope:
    """``[0, a] x [0, b]``, the moment polytope of CP^1 x CP^1."""
    _positive(a=a, b=b)
    return DelzantPolytope([((-1, 0), 0), ((0, -1), 0), ((1, 0), a), ((0, 1), b)])


square = rectangle


def hirzebruch(k: int = 1, c1: int = 2, c2: int = 1) -> DelzantPolytope:
    """Trapezoid ``{y >= 0, y_1 + k y_2 <= c1, y_2 <= c2}`` of the Hirzebruch surface."""
    _positive(c1=c1, c2=c2)
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if c1 <= k * c2:
        raise ValueError(f"need c1 > k*c2 for a trapezoid, got c1={c1}, k*c2={k * c2}")
    return DelzantPolytope([((-1, 0), 0), ((0, -1), 0), ((1, k), c1), ((0, 1), c2)])


def standard_polytopes() -> dict[str, DelzantPolytope]:
    """The desk-scale suite: interval, square, 2-simplex and a Hirzebruch trapezoid."""
    return {
        "interval": interval(1),
        "square": square(1, 1),
        "simplex": simplex(2),
        "hirzebruch": hirzebruch(1, 2, 1),
    }
