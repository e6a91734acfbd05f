"""Distortion (Christoffel-Darboux) functions and Bergman measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gram import GramSystem, gram_system
from .measures import DiscreteMeasure
from .model_spaces import WeightedSet, adapted_basis, as_points, dimension

BM_RATE_THRESHOLD = 0.01


def rho_values(gs: GramSystem, points) -> np.ndarray:
    """``rho(mu, k phi)`` at each point: sum of |t_i|^2 e^{-2k phi} over orthonormal t_i."""
    gs.require_nonsingular()
    pts = as_points(gs.wset.model, points)
    from scipy import linalg

    B, _ = adapted_basis(gs.wset, gs.k, pts)
    V = linalg.solve_triangular(gs.R, B.T, trans="T", lower=False)
    s = np.sum(np.abs(V) ** 2, axis=0)
    return s * np.exp(-2.0 * gs.k * (gs.weight(pts) - gs.phi_shift))


def rho_at(gs: GramSystem, x) -> float:
    return float(rho_values(gs, x)[0])


@dataclass(frozen=True)
class BergmanField:
    k: int
    grid: np.ndarray
    rho_values: np.ndarray
    sup_rho: float
    source: GramSystem = field(repr=False)


def bergman_field(gs: GramSystem, grid) -> BergmanField:
    grid = as_points(gs.wset.model, grid)
    vals = rho_values(gs, grid)
    return BergmanField(gs.k, grid, vals, float(vals.max()), gs)


def bergman_measure(gs: GramSystem) -> DiscreteMeasure:
    """``beta = rho * mu / N`` on the atoms of ``mu``."""
    mu = gs.measure
    masses = mu.masses * rho_values(gs, mu.atoms) / gs.N
    total = masses.sum()
    if abs(total - 1.0) > 1e-8:
        raise ArithmeticError(f"trace identity violated: Bergman masses sum to {total!r}")
    return DiscreteMeasure(mu.atoms, masses / total, mu.model)


def growth_fit(degrees: Sequence[int], dims: Sequence[int], values: Sequence[float]):
    """Fit ``log v`` against ``log N`` alone and against ``(log N, k)`` jointly.

    Returns ``(poly_exponent, exp_rate)``: the slope in ``log N`` of the
    one-regressor fit and the ``k`` coefficient of the joint fit. Exact
    power laws in ``N`` therefore have zero exponential rate.
    """
    k = np.asarray(degrees, dtype=float)
    logn = np.log(np.asarray(dims, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    X1 = np.column_stack([np.ones_like(k), logn])
    poly = np.linalg.lstsq(X1, y, rcond=None)[0][1]
    X2 = np.column_stack([np.ones_like(k), logn, k])
    rate = np.linalg.lstsq(X2, y, rcond=None)[0][2]
    return float(poly), float(rate)


@dataclass
class BMDiagnostic:
    degrees: list
    sup_rho: list
    poly_exponent: float
    exp_rate: float
    bm_flag: bool

    def to_json(self) -> dict:
        return {
            "degrees": list(self.degrees),
            "sup_rho": list(self.sup_rho),
            "poly_exponent": self.poly_exponent,
            "exp_rate": self.exp_rate,
            "bm_flag": self.bm_flag,
        }


def bm_growth_diagnostic(
    wset: WeightedSet, mu: DiscreteMeasure, degrees: Sequence[int], oversample: int = 4
) -> BMDiagnostic:
    """Growth of ``sup_K rho(mu, k phi)`` over the candidate grid.

    The measure is flagged Bernstein-Markov when the fitted exponential rate
    is at most 0.01 per degree (a pragmatic cutoff).
    """
    degrees = list(degrees)
    if len(degrees) < 3:
        raise ValueError("growth diagnostics need at least 3 degrees")
    sups = []
    for k in degrees:
        gs = gram_system(wset, mu, k)
        sups.append(float(rho_values(gs, wset.candidates(k, oversample)).max()))
    dims = [dimension(wset.model, k) for k in degrees]
    poly, rate = growth_fit(degrees, dims, sups)
    return BMDiagnostic(degrees, sups, poly, rate, bool(rate <= BM_RATE_THRESHOLD))


def extremal_weight_estimate(gs: GramSystem, x) -> float:
    """``phi(x) + log(rho(x)) / 2k``, a proxy for the extremal weight at ``x``."""
    pts = as_points(gs.wset.model, x)
    return float(gs.weight(pts)[0] + math.log(rho_at(gs, pts)) / (2.0 * gs.k))


def write_field_csv(path, bf: BergmanField) -> None:
    """Point coordinates plus a ``rho`` column, 17 significant digits."""
    import csv

    def fmt(v):
        return format(float(v), ".17g")

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if bf.grid.ndim == 1:
            w.writerow(["index", "x_re", "x_im", "rho"])
            for i, (z, r) in enumerate(zip(bf.grid, bf.rho_values)):
                w.writerow([i, fmt(z.real), fmt(z.imag), fmt(r)])
        else:
            w.writerow(["index", "x", "y", "z", "rho"])
            for i, (p, r) in enumerate(zip(bf.grid, bf.rho_values)):
                w.writerow([i, fmt(p[0]), fmt(p[1]), fmt(p[2]), fmt(r)])
