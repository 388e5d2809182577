"""Exception types raised across the package."""


class PolytopeError(ValueError):
    """Invalid polytope data (bad normals, empty interior, malformed file)."""


class DelzantError(PolytopeError):
    """A vertex violates the Delzant condition."""

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class EmptyPolytopeError(PolytopeError):
    """The polytope (or a dilation of it) has no interior point."""


class BoundaryError(ValueError):
    """A point that must be interior lies on or outside the boundary."""


class IllConditionedError(ArithmeticError):
    """Hessian inversion requested too close to the boundary."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class CalibrationError(RuntimeError):
    """The oracle/Abreu ratio is not constant across the calibration suite."""

    def __init__(self, message, offenders=()):
        super().__init__(message)
        self.offenders = list(offenders)
