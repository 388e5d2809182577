"""Toric Kähler geometry on Delzant polytopes: symplectic potentials, weight
sections, spectral measures and their large-N expansions."""

from .asymptotics import (
    ExpansionFit,
    euler_maclaurin_sum,
    fit_expansion,
    laplace_norm,
    log_laplace_norm,
    measure_expansion,
    psi_sharp,
    psi_sharp_expansion_coeff,
    todd_tau,
    tyz_fit,
    tyz_ratio,
)
from .curvature import abreu_scalar, calibrate, calibration_constant, riemann_scalar_oracle
from .errors import (
    BoundaryError,
    CalibrationError,
    ConvergenceError,
    DelzantError,
    EmptyPolytopeError,
    IllConditionedError,
    PolytopeError,
)
from .phi import PhiEvaluator, lemma_suite
from .polynomial import Polynomial
from .polytope import (
    DelzantPolytope,
    Facet,
    LatticeSet,
    Polytope,
    dilate,
    hirzebruch,
    interval,
    rectangle,
    simplex,
    square,
    standard_polytopes,
)
from .potential import SymplecticPotential, standard_potentials
from .quadrature import QuadratureSpec, facet_integral, integrate
from .sections import Bump, Constant, PolynomialFunction, SectionFamily

__version__ = "0.1.0"
