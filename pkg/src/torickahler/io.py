"""Reading polytope/potential description files and writing reports."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import PolytopeError
from .polynomial import Polynomial
from .polytope import DelzantPolytope
from .potential import SymplecticPotential

__all__ = ["load_polytope", "load_potential", "potential_from_dict", "dump_json"]


def potential_from_dict(data: dict) -> SymplecticPotential:
    """Potential from ``{"dim", "facets", "perturbation"?}``; the perturbation list is optional."""
    poly = DelzantPolytope.from_dict(data)
    raw = data.get("perturbation")
    pert = None
    if raw:
        try:
            pert = Polynomial.from_list(raw, poly.dim)
        except (KeyError, TypeError, ValueError) as exc:
            raise PolytopeError(f"invalid perturbation: {exc}") from None
    return SymplecticPotential(poly, pert)


def _read(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise PolytopeError(f"{path}: invalid JSON ({exc})") from None


def load_polytope(path) -> DelzantPolytope:
    return DelzantPolytope.from_dict(_read(path))


def load_potential(path) -> SymplecticPotential:
    return potential_from_dict(_read(path))


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dump_json(data, path) -> None:
    """Write ``data`` with sorted keys so identical inputs give identical bytes."""
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=_default)
        fh.write("\n")
