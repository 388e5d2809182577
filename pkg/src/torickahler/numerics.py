"""Small numerical helpers shared by several modules."""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["richardson_extrapolate"]


def richardson_extrapolate(values: Sequence[float], p: int = 1, r: float = 2.0) -> float:
    """Eliminate successive error terms ``h^p, h^(p+1), ...`` from a refinement sequence.

    ``values[k]`` is the approximation at step ``h0 / r**k``.
    """
    if len(values) < 2:
        raise ValueError("need at least two values to extrapolate")
    vals = [float(v) for v in values]
    for j in range(1, len(vals)):
        factor = r ** (p + j - 1)
        vals = [(factor * vals[k + 1] - vals[k]) / (factor - 1.0) for k in range(len(vals) - 1)]
    return vals[0]
