"""Scalar curvature of toric metrics.

:func:`abreu_scalar` evaluates ``-1/2 d_a d_b G^{ab}`` from exact
derivatives of the symplectic potential.  :func:`riemann_scalar_oracle`
shares none of that algebra: it builds the action-angle metric
``diag(G, G^{-1})`` on ``(y, v)`` and runs generic Christoffel/Riemann code
on finite differences of its components.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryError, CalibrationError
from .numerics import richardson_extrapolate
from .potential import SymplecticPotential, standard_potentials

__all__ = [
    "inverse_hessian_derivatives",
    "abreu_scalar",
    "riemann_scalar_oracle",
    "CalibrationReport",
    "calibrate",
    "calibration_constant",
    "sample_points",
    "write_curvature_csv",
]


def inverse_hessian_derivatives(potential: SymplecticPotential, y):
    """``G^{ab}``, ``d_c G^{ab}`` and ``d_c d_e G^{ab}`` from derivatives of ``g`` up to order 4.

    Returned shapes are ``(..., n, n)``, ``(..., n, n, n)`` indexed ``[c, a, b]``
    and ``(..., n, n, n, n)`` indexed ``[c, e, a, b]``.
    """
    ginv = np.linalg.inv(potential.hess(y))
    d3 = potential.deriv3(y)
    d4 = potential.deriv4(y)
    # A[c] = Ginv (d_c G) Ginv
    a = np.einsum("...ij,...cjk,...kl->...cil", ginv, d3, ginv)
    dginv = -a
    term = np.einsum("...cij,...ejk,...kl->...ceil", a, d3, ginv)
    d2ginv = (term + np.swapaxes(term, -3, -4)
              - np.einsum("...ij,...cejk,...kl->...ceil", ginv, d4, ginv))
    return ginv, dginv, d2ginv


def abreu_scalar(potential: SymplecticPotential, y):
    """``s(y) = -1/2 sum_{a,b} d^2 G^{ab} / dy_a dy_b`` at interior points."""
    _, _, d2 = inverse_hessian_derivatives(potential, y)
    return -0.5 * np.einsum("...abab->...", d2)


def _action_angle_metric(potential, y):
    g = potential.hess(y)
    n = g.shape[-1]
    m = np.zeros((2 * n, 2 * n))
    m[:n, :n] = g
    m[n:, n:] = np.linalg.inv(g)
    return m


def _metric_derivatives(metric, y, h):
    """Central differences of ``metric`` in the first ``len(y)`` coordinates."""
    n = len(y)
    m0 = metric(y)
    dim = m0.shape[0]
    d1 = np.zeros((dim, dim, dim))
    d2 = np.zeros((dim, dim, dim, dim))
    e = np.eye(n) * h
    plus = [metric(y + e[k]) for k in range(n)]
    minus = [metric(y - e[k]) for k in range(n)]
    for k in range(n):
        d1[k] = (plus[k] - minus[k]) / (2 * h)
        d2[k, k] = (plus[k] - 2 * m0 + minus[k]) / h ** 2
        for l in range(k + 1, n):
            mixed = (metric(y + e[k] + e[l]) - metric(y + e[k] - e[l])
                     - metric(y - e[k] + e[l]) + metric(y - e[k] - e[l])) / (4 * h * h)
            d2[k, l] = d2[l, k] = mixed
    return m0, d1, d2


def scalar_from_metric(g, dg, ddg) -> float:
    """Scalar curvature from the metric and its first and second coordinate derivatives.

    ``dg[m, i, j] = d_m g_ij`` and ``ddg[m, p, i, j] = d_m d_p g_ij``.
    """
    ginv = np.linalg.inv(g)
    # Christoffel symbols of the first kind, then raised
    first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    gam = np.einsum("kl,lij->kij", ginv, first)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dfirst = 0.5 * (np.einsum("mijl->mlij", ddg) + np.einsum("mjil->mlij", ddg) - ddg)
    dgam = (np.einsum("mkl,lij->mkij", dginv, first)
            + np.einsum("kl,mlij->mkij", ginv, dfirst))
    # R^r_{s m n} = d_m Gam^r_{ns} - d_n Gam^r_{ms} + Gam^r_{ml} Gam^l_{ns} - Gam^r_{nl} Gam^l_{ms}
    riem = (np.einsum("mrns->rsmn", dgam) - np.einsum("nrms->rsmn", dgam)
            + np.einsum("rml,lns->rsmn", gam, gam) - np.einsum("rnl,lms->rsmn", gam, gam))
    ric = np.einsum("rsrn->sn", riem)
    return float(np.einsum("sn,sn->", ginv, ric))


def riemann_scalar_oracle(potential: SymplecticPotential, y, step: float = 1e-3) -> float:
    """Riemannian scalar curvature of ``G dy^2 + G^{-1} dv^2`` at ``(y, v)``.

    Metric derivatives are central differences with steps ``h`` and
    ``h/2``, Richardson-combined.
    """
    y = np.asarray(y, dtype=float)
    poly = potential.polytope
    reach = 2 * step * np.linalg.norm(poly.normals, axis=1)
    if np.any(poly.l(y) <= reach):
        raise BoundaryError("finite-difference stencil leaves the polytope interior")
    n = len(y)

    def metric(p):
        return _action_angle_metric(potential, p)

    vals = []
    for h in (step, step / 2):
        g, d1, d2 = _metric_derivatives(metric, y, h)
        dim = 2 * n
        dg = np.zeros((dim, dim, dim))
        ddg = np.zeros((dim, dim, dim, dim))
        dg[:n] = d1[:n]
        ddg[:n, :n] = d2[:n, :n]
        vals.append(scalar_from_metric(g, dg, ddg))
    return richardson_extrapolate(vals, p=2, r=2.0)


def sample_points(poly, count: int = 5, shrink: float = 0.6, seed: int = 0) -> np.ndarray:
    """Deterministic interior points: the centroid and random convex combinations pulled toward it."""
    rng = np.random.default_rng(seed)
    v = poly.vertices
    c = poly.centroid
    w = rng.dirichlet(np.ones(len(v)), size=count - 1)
    return np.vstack([c, c + shrink * (w @ v - c)])


@dataclass
class CalibrationReport:
    kappa: float
    tolerance: float
    records: list[dict] = field(default_factory=list)

    @property
    def max_deviation(self) -> float:
        return max(abs(r["kappa"] / self.kappa - 1) for r in self.records)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {"kappa": self.kappa, "tolerance": self.tolerance,
                "max_deviation": self.max_deviation, "passed": self.passed,
                "records": self.records}


def calibrate(suite: dict | None = None, n_points: int = 5, tol: float = 0.01,
              raise_on_failure: bool = True) -> CalibrationReport:
    """Ratio ``oracle / abreu`` across a suite of potentials.

    The reference ``kappa`` is the mean ratio on the canonical interval (or
    on the first suite entry when that is absent); every other ratio must
    agree with it to relative ``tol``.
    """
    suite = suite or standard_potentials()
    records = []
    for name, pot in suite.items():
        for y in sample_points(pot.polytope, n_points):
            s = float(abreu_scalar(pot, y))
            r = riemann_scalar_oracle(pot, y)
            records.append({"case": name, "y": y.tolist(), "abreu": s, "oracle": r,
                            "kappa": r / s})
    ref_name = "interval" if "interval" in suite else next(iter(suite))
    kappa = float(np.mean([r["kappa"] for r in records if r["case"] == ref_name]))
    report = CalibrationReport(kappa, tol, records)
    if raise_on_failure and not report.passed:
        bad = [r for r in records if abs(r["kappa"] / kappa - 1) > tol]
        raise CalibrationError(
            f"oracle/abreu ratio varies beyond {tol:g} at {len(bad)} points", offenders=bad)
    return report


def calibration_constant(suite: dict | None = None, n_points: int = 5, tol: float = 0.01) -> float:
    """The global constant ``kappa`` relating the Riemannian oracle to Abreu's formula."""
    return calibrate(suite, n_points, tol).kappa


def write_curvature_csv(path, potential: SymplecticPotential, points) -> None:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    s = np.atleast_1d(abreu_scalar(potential, points))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"y{k}" for k in range(potential.dim)] + ["s_abreu"])
        for y, v in zip(points, s):
            w.writerow([repr(float(c)) for c in y] + [repr(float(v))])
