"""Batch experiment driver.

Usage::

    torickahler {curvature,tyz,measure,lemmas} --config CONFIG [--out DIR] [--threads K] [--verbose]

The config is JSON.  ``polytope`` is either a path (relative to the config
file) to a polytope description or the description itself; a top-level ``perturbation``
list overrides the one in the spec.  Per-command blocks carry the
experiment parameters, see the README for the keys.

Exit codes: 0 success, 1 numerical acceptance failure, 2 configuration or
validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .asymptotics import measure_expansion, tyz_fit
from .curvature import abreu_scalar, riemann_scalar_oracle
from .errors import PolytopeError
from .io import dump_json, potential_from_dict
from .phi import lemma_suite
from .potential import SymplecticPotential
from .quadrature import QuadratureSpec
from .sections import Bump

log = logging.getLogger("torickahler")


class ConfigError(Exception):
    """Bad or inconsistent experiment configuration (exit code 2)."""


def _load_config(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None


def _potential(cfg: dict, base: Path) -> SymplecticPotential:
    spec = cfg.get("polytope")
    if spec is None:
        raise ConfigError("config needs a 'polytope' entry")
    if isinstance(spec, str):
        path = (base / spec) if not Path(spec).is_absolute() else Path(spec)
        try:
            with open(path) as fh:
                spec = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"polytope file {path} does not exist") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"polytope file {path} is not valid JSON: {exc}") from None
    spec = dict(spec)
    if "perturbation" in cfg:
        spec["perturbation"] = cfg["perturbation"]
    try:
        return potential_from_dict(spec)
    except (PolytopeError, ValueError) as exc:
        raise ConfigError(f"invalid polytope: {exc}") from None


def _quad_spec(cfg: dict) -> QuadratureSpec:
    try:
        return QuadratureSpec(**cfg.get("quadrature", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid quadrature block: {exc}") from None


def _n_list(block: dict, default=None) -> list[int]:
    ns = block.get("N", default)
    if not ns:
        raise ConfigError("N-list is empty")
    if any(int(v) != v or v < 1 for v in ns):
        raise ConfigError(f"N-list must hold positive integers, got {ns}")
    if list(ns) != sorted(set(ns)):
        raise ConfigError(f"N-list must be strictly ascending, got {ns}")
    return [int(v) for v in ns]


def _points(pot: SymplecticPotential, block: dict) -> np.ndarray:
    pts = block.get("points")
    if pts is None:
        return pot.polytope.centroid[None, :]
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if pts.shape[1] != pot.dim or not np.all(pot.polytope.is_interior(pts)):
        raise ConfigError(f"evaluation points must be interior {pot.dim}-vectors")
    return pts


def _validated(pot: SymplecticPotential) -> None:
    report = pot.validate()
    if not report.passed:
        raise ConfigError(f"potential fails validation: {json.dumps(report.to_dict())}")


def _interior_grid(pot: SymplecticPotential, per_axis: int, margin: float) -> np.ndarray:
    poly = pot.polytope
    lo, hi = poly.bounding_box()
    ticks = [lo[k] + (np.arange(per_axis) + 0.5) / per_axis * (hi[k] - lo[k])
             for k in range(pot.dim)]
    pts = np.stack(np.meshgrid(*ticks, indexing="ij"), -1).reshape(-1, pot.dim)
    return pts[np.all(poly.l(pts) > margin, axis=1)]


def cmd_curvature(pot, cfg, out: Path, threads: int) -> dict:
    block = cfg.get("curvature", {})
    per_axis = int(block.get("grid", 9))
    tol = float(block.get("tolerance", 0.01))
    pts = _interior_grid(pot, per_axis, float(block.get("margin", 0.02)))
    if not len(pts):
        raise ConfigError("curvature grid has no interior points")
    s = np.atleast_1d(abreu_scalar(pot, pts))
    oracle = np.array([riemann_scalar_oracle(pot, y) for y in pts])
    ratio = oracle / s
    with open(out / "curvature.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"y{k}" for k in range(pot.dim)] + ["s_abreu", "s_oracle", "ratio"])
        for y, a, o, r in zip(pts, s, oracle, ratio):
            w.writerow([repr(float(v)) for v in y] + [repr(float(a)), repr(float(o)), repr(float(r))])
    kappa = float(np.mean(ratio))
    spread = float(np.max(np.abs(ratio / kappa - 1)))
    report = {"command": "curvature", "points": len(pts), "kappa_mean": kappa,
              "kappa_min": float(ratio.min()), "kappa_max": float(ratio.max()),
              "kappa_spread": spread, "tolerance": tol, "passed": spread <= tol,
              "s_abreu_range": [float(s.min()), float(s.max())]}
    dump_json(report, out / "curvature.json")
    return report


def cmd_tyz(pot, cfg, out: Path, threads: int) -> dict:
    block = cfg.get("tyz", {})
    ns = _n_list(block)
    if len(ns) < 3:
        raise ConfigError("tyz needs at least three N values")
    tol = float(block.get("tolerance", 0.05))
    pts = _points(pot, block)
    fits = tyz_fit(pot, pts, ns, _quad_spec(cfg), threads)
    rows = []
    for y, fit in zip(pts, fits):
        target = float(abreu_scalar(pot, y)) / 2
        err = abs(fit.ratio - target) / abs(target)
        rows.append({"y": y.tolist(), "b0": fit.coefficients[0], "b1": fit.coefficients[1],
                     "ratio": fit.ratio, "half_abreu_scalar": target, "relative_error": err,
                     "rho": fit.values, "passed": err <= tol})
    report = {"command": "tyz", "N": ns, "tolerance": tol, "points": rows,
              "passed": all(r["passed"] for r in rows)}
    dump_json(report, out / "tyz.json")
    return report


def cmd_measure(pot, cfg, out: Path, threads: int) -> dict:
    block = cfg.get("measure", {})
    ns = _n_list(block)
    if len(ns) < 3:
        raise ConfigError("measure needs at least three N values")
    tol0, tol1 = block.get("tolerance", [0.005, 0.05])
    bump = block.get("bump")
    if bump is None:
        raise ConfigError("measure needs a 'bump' block with center and radius")
    try:
        psi = Bump(bump["center"], bump["radius"], bump.get("scale", 1.0))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid bump: {exc}") from None
    if len(psi.center) != pot.dim or not psi.compactly_supported_in(pot.polytope):
        raise ConfigError("bump support is not strictly inside the polytope")
    fit = measure_expansion(pot, psi, ns, _quad_spec(cfg), threads)
    errs = fit.relative_errors
    zero = psi.is_zero()
    report = {"command": "measure", "bump": {"center": psi.center.tolist(),
                                             "radius": psi.radius, "scale": psi.scale},
              "fit": fit.to_dict(), "tolerance": [tol0, tol1],
              "passed": zero or (errs[0] <= tol0 and errs[1] <= tol1)}
    dump_json(report, out / "measure.json")
    return report


def cmd_lemmas(pot, cfg, out: Path, threads: int) -> dict:
    block = cfg.get("lemmas", {})
    _validated(pot)
    result = lemma_suite(pot, n_samples=int(block.get("samples", 20)),
                         seed=int(block.get("seed", 0)))
    report = {"command": "lemmas", "results": result,
              "passed": all(v["passed"] for v in result.values())}
    dump_json(report, out / "lemmas.json")
    return report


COMMANDS = {"curvature": cmd_curvature, "tyz": cmd_tyz, "measure": cmd_measure,
            "lemmas": cmd_lemmas}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torickahler", description=__doc__.split("\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out", type=Path, default=Path("."))
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = _load_config(args.config)
        pot = _potential(cfg, args.config.parent)
        args.out.mkdir(parents=True, exist_ok=True)
        report = COMMANDS[args.command](pot, cfg, args.out, args.threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical module errors
        log.debug("failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    log.info("%s: %s", args.command, "passed" if report["passed"] else "FAILED")
    if not report["passed"]:
        print(f"{args.command}: acceptance check failed, see {args.out}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
