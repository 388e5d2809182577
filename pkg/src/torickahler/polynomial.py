"""Sparse multivariate polynomials with exact derivative tensors."""

from __future__ import annotations

import itertools

import numpy as np

__all__ = ["Polynomial"]


def _falling(e: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Falling factorial ``e (e-1) ... (e-k+1)`` elementwise."""
    out = np.ones(np.broadcast(e, k).shape)
    for j in range(int(np.max(k, initial=0))):
        out = out * np.where(k > j, e - j, 1)
    return out


class Polynomial:
    """``sum_k coeff_k * y^alpha_k`` in ``n`` variables.

    Parameters
    ----------
    terms : iterable of (exponents, coeff)
        Exponent vectors (non-negative integers) and real coefficients.
    dim : int, optional
        Number of variables; required when ``terms`` is empty.
    """

    def __init__(self, terms=(), dim: int | None = None):
        terms = [(tuple(int(a) for a in e), float(c)) for e, c in terms]
        if dim is None:
            if not terms:
                raise ValueError("dim is required for an empty polynomial")
            dim = len(terms[0][0])
        for e, _ in terms:
            if len(e) != dim or min(e, default=0) < 0:
                raise ValueError(f"bad exponent vector {e} for dim {dim}")
        self.dim = dim
        self.terms = tuple(terms)
        self._exps = np.array([e for e, _ in terms], dtype=float).reshape(-1, dim)
        self._coeffs = np.array([c for _, c in terms], dtype=float)

    def __repr__(self):
        body = " + ".join(f"{c:g}*y^{list(e)}" for e, c in self.terms) or "0"
        return f"Polynomial({body})"

    def __bool__(self):
        return bool(np.any(self._coeffs))

    def derivative(self, y, multi_index) -> np.ndarray:
        """The partial derivative ``d^beta p`` with ``beta`` given as a count vector."""
        y = np.asarray(y, dtype=float)
        beta = np.asarray(multi_index, dtype=float)
        if not len(self.terms):
            return np.zeros(y.shape[:-1])
        e = self._exps - beta
        factor = self._coeffs * np.prod(_falling(self._exps, beta), axis=1)
        live = np.all(e >= 0, axis=1) & (factor != 0)
        if not np.any(live):
            return np.zeros(y.shape[:-1])
        mono = np.prod(y[..., None, :] ** e[live], axis=-1)
        return mono @ factor[live]

    def __call__(self, y) -> np.ndarray:
        return self.derivative(y, np.zeros(self.dim))

    def deriv_tensor(self, y, order: int) -> np.ndarray:
        """Symmetric tensor of all order-``order`` partials, shape ``(..., n, ..., n)``."""
        y = np.asarray(y, dtype=float)
        n = self.dim
        out = np.empty(y.shape[:-1] + (n,) * order)
        cache = {}
        for idx in itertools.product(range(n), repeat=order):
            key = tuple(sorted(idx))
            if key not in cache:
                cache[key] = self.derivative(y, np.bincount(key, minlength=n))
            out[(...,) + idx] = cache[key]
        return out

    def grad(self, y) -> np.ndarray:
        return self.deriv_tensor(y, 1)

    def hess(self, y) -> np.ndarray:
        return self.deriv_tensor(y, 2)

    def to_list(self) -> list[dict]:
        return [{"exponents": list(e), "coeff": c} for e, c in self.terms]

    @classmethod
    def from_list(cls, data, dim: int) -> Polynomial:
        """Parse ``[{"exponents": [..], "coeff": x}, ...]``."""
        return cls([(d["exponents"], d["coeff"]) for d in data], dim=dim)
