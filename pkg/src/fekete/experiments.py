"""Degree sweeps shared by the command line and the acceptance suite."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import bergman, configurations, design, gram, measures
from .measures import DiscreteMeasure, ReferenceLaw
from .model_spaces import (
    SPHERE2,
    Kind,
    SupportKind,
    WeightedSet,
    chebyshev_gauss,
    circle,
    dimension,
    disk,
    equispaced_circle,
    interval,
    sphere,
    sphere_grid_shape,
    sphere_product_grid,
    Weight,
    WeightKind,
)

METHODS = ("fekete", "greedy", "leja", "greedy-extremal")
MEASURES = ("uniform", "arcsine", "optimal")
HARMONIC_DEGREE = 4


def parse_domain(spec: str, weight: Weight = Weight.zero()) -> WeightedSet:
    """``interval``, ``circle[:R]``, ``disk[:R]`` or ``sphere``."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "interval" and not arg:
        return interval(weight)
    if name in ("circle", "disk"):
        r = float(arg) if arg else 1.0
        return circle(r, weight) if name == "circle" else disk(r, weight)
    if name == "sphere" and not arg:
        if weight.kind is not WeightKind.ZERO:
            raise ValueError("the sphere supports only the zero weight")
        return sphere()
    raise ValueError(f"unknown domain {spec!r}")


def parse_weight(spec: str) -> Weight:
    """``zero``, ``quad:C`` or ``logshift:RE,IM``."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "zero" and not arg:
        return Weight.zero()
    if name == "quad":
        return Weight.quadratic(float(arg))
    if name == "logshift":
        re, _, im = arg.partition(",")
        return Weight.log_abs_shift(complex(float(re), float(im or 0.0)))
    raise ValueError(f"unknown weight {spec!r}")


def uniform_measure(wset: WeightedSet, k: int) -> DiscreteMeasure:
    """Normalized Lebesgue/arclength/area/surface measure, exact for the degree-k Gram."""
    kind = wset.support.kind
    m = max(256, 8 * (k + 1))
    if kind is SupportKind.INTERVAL:
        x, w = np.polynomial.legendre.leggauss(m)
        return DiscreteMeasure(x.astype(complex), w / 2.0)
    if kind is SupportKind.CIRCLE:
        return DiscreteMeasure.uniform(equispaced_circle(m, wset.support.radius))
    if kind is SupportKind.DISK:
        # uniform in area: Gauss-Legendre in r^2, equispaced angles
        nr, na = k + 2, 2 * k + 2
        t, w = np.polynomial.legendre.leggauss(nr)
        radii = wset.support.radius * np.sqrt((t + 1.0) / 2.0)
        pts = (radii[:, None] * np.exp(2j * np.pi * np.arange(na) / na)[None, :]).ravel()
        return DiscreteMeasure(pts, np.repeat(w / 2.0, na) / na)
    if kind is SupportKind.SPHERE:
        xyz, w = sphere_product_grid(*sphere_grid_shape(k, 4))
        return DiscreteMeasure(xyz, w, SPHERE2)
    return DiscreteMeasure.uniform(wset.support.points, wset.model)


def arcsine_measure(k: int) -> DiscreteMeasure:
    return DiscreteMeasure.uniform(chebyshev_gauss(max(256, 8 * (k + 1))).astype(complex))


def standard_measure(wset: WeightedSet, kind: str, k: int, oversample=None) -> DiscreteMeasure:
    if kind == "uniform":
        return uniform_measure(wset, k)
    if kind == "arcsine":
        if wset.support.kind is not SupportKind.INTERVAL:
            raise ValueError("the arcsine measure lives on the interval")
        return arcsine_measure(k)
    if kind == "optimal":
        return design.optimal_measure_fixed_point(wset, k, oversample=oversample).measure
    raise ValueError(f"unknown measure {kind!r}")


def search_set(wset: WeightedSet, k: int) -> WeightedSet:
    """On the sphere, searches run over the uniform measure's quadrature nodes."""
    if wset.model.kind is Kind.SPHERE2 and wset.grid is None:
        return wset.with_grid(uniform_measure(wset, k).atoms)
    return wset


def find_points(wset: WeightedSet, k: int, method: str, oversample=None, measure="uniform"):
    """Configuration search by name; returns a FeketeResult or RecursiveTrace."""
    ws = search_set(wset, k)
    if method == "fekete":
        return configurations.fekete_search(ws, k, oversample=oversample)
    if method == "greedy":
        return configurations.fekete_search(ws, k, oversample=oversample, exchange=False)
    if method == "leja":
        return configurations.leja_result(ws, k, oversample)
    if method == "greedy-extremal":
        mu = standard_measure(ws, measure, k, oversample)
        return configurations.recursively_extremal(ws, mu, k, oversample)
    raise ValueError(f"unknown method {method!r}")


def equidistribution_distance(wset: WeightedSet, mu: DiscreteMeasure, law: Optional[ReferenceLaw] = None):
    """KS distance on 1-D sets, harmonic discrepancy (L=4) on the sphere."""
    if wset.model.kind is Kind.SPHERE2:
        return "harmonic_discrepancy", measures.harmonic_discrepancy(mu, HARMONIC_DEGREE)
    if law is None:
        law = measures.reference_equilibrium(wset)
    return "ks", measures.ks_distance(mu, law)


def equilibrium_energy(wset: WeightedSet) -> Optional[float]:
    """Closed-form limit of the k-diameter relative to the reference pair, if known."""
    if wset.weight.kind is not WeightKind.ZERO:
        return None
    kind = wset.support.kind
    if kind is SupportKind.INTERVAL:
        return 0.5 * math.log(2.0)
    if kind in (SupportKind.CIRCLE, SupportKind.DISK):
        return -0.5 * math.log(wset.support.radius)
    if kind is SupportKind.SPHERE:
        return 0.0
    return None


def result_sidecar(wset: WeightedSet, k: int, res, method: str) -> dict:
    out = {
        "method": getattr(getattr(res, "method", None), "value", "RecursiveExtremal"),
        "k": k,
        "N": dimension(wset.model, k),
        "log_abs_det_weighted": res.log_abs_det_weighted,
        "k_diameter": configurations.k_diameter(wset, k, res),
        "sweeps": getattr(res, "iterations", 0) if method != "greedy-extremal" else 0,
        "converged": bool(getattr(res, "converged", True)),
    }
    name, value = equidistribution_distance(wset, res.config.as_measure())
    out[name] = value
    return out


def sweep_report(
    wset: WeightedSet,
    degrees,
    method: str = "fekete",
    measure: str = "uniform",
    oversample=None,
) -> dict:
    """Per-degree metrics and a summary for the convergence report."""
    law = None if wset.model.kind is Kind.SPHERE2 else measures.reference_equilibrium(wset)
    records = []
    for k in degrees:
        n = dimension(wset.model, k)
        ws = search_set(wset, k)
        pts = find_points(wset, k, method, oversample, measure)
        fek = pts if method == "fekete" else configurations.fekete_search(ws, k, oversample=oversample)
        mu = standard_measure(ws, measure, k, oversample)
        gs = gram.gram_system(ws, mu, k)
        beta = bergman.bergman_measure(gs)
        sup = float(bergman.rho_values(gs, ws.candidates(k, oversample)).max())
        d_hat = configurations.k_diameter(wset, k, fek)
        l_mu = gram.l_functional(ws, mu, k)
        name, dist_pts = equidistribution_distance(wset, pts.config.as_measure(), law)
        _, dist_beta = equidistribution_distance(wset, beta, law)
        rec = {
            "k": k,
            "N": n,
            "l_functional": l_mu,
            "l_functional_points": gram.l_functional(ws, pts.config.as_measure(), k),
            "k_diameter": d_hat,
            "sup_rho": sup,
            f"{name}_points": dist_pts,
            f"{name}_bergman": dist_beta,
            "bergman_resolution": 0.5 * float(beta.masses.max()),
            "l_minus_d_gap": l_mu - d_hat,
            "asymptotic_fekete_value": pts.log_abs_det_weighted / (k * n),
        }
        records.append(rec)
    summary = summarize(wset, records)
    return {
        "domain": wset.support.label(),
        "weight": wset.weight.kind.value,
        "method": method,
        "measure": measure,
        "degrees": list(degrees),
        "records": records,
        "summary": summary,
    }


def _slope(ks, ys) -> float:
    if len(ks) < 2:
        return 0.0
    return float(np.polyfit(np.log(np.asarray(ks, float)), np.asarray(ys, float), 1)[0])


def _decreasing(values, floors=None) -> bool:
    """Strictly decreasing, except between values already at their resolution floor.

    A measure on finitely many atoms is at KS distance at least half its
    largest mass from any continuous law, so such values count as converged.
    """
    floors = [0.0] * len(values) if floors is None else floors
    at_floor = [v <= f * (1.0 + 1e-9) for v, f in zip(values, floors)]
    return bool(all(b < a or (fa and fb) for a, b, fa, fb in zip(values, values[1:], at_floor, at_floor[1:])))


def summarize(wset: WeightedSet, records: list) -> dict:
    ks = [r["k"] for r in records]
    metric = "harmonic_discrepancy" if wset.model.kind is Kind.SPHERE2 else "ks"
    pts = [r[f"{metric}_points"] for r in records]
    beta = [r[f"{metric}_bergman"] for r in records]
    out = {
        "trend_slopes_vs_log_k": {
            f"{metric}_points": _slope(ks, pts),
            f"{metric}_bergman": _slope(ks, beta),
            "k_diameter": _slope(ks, [r["k_diameter"] for r in records]),
            "l_minus_d_gap": _slope(ks, [r["l_minus_d_gap"] for r in records]),
        },
        "final": dict(records[-1]) if records else {},
        "checks": {
            f"{metric}_points_decreasing": _decreasing(pts),
            f"{metric}_bergman_decreasing": _decreasing(
                beta, [r["bergman_resolution"] for r in records] if metric == "ks" else None
            ),
        },
    }
    energy = equilibrium_energy(wset)
    if energy is not None and records:
        out["equilibrium_energy"] = energy
        out["k_diameter_error"] = records[-1]["k_diameter"] - energy
        out["checks"]["k_diameter_within_0.03"] = bool(abs(out["k_diameter_error"]) <= 0.03)
    return out


# --------------------------------------------------------------------------
# JSON with 17 significant digits


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return format(v, ".17g")
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(key), indent, level + 1)}: {_encode(v, indent, level + 1)}" for key, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))
