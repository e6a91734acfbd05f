"""Optimal measures, Lagrange sections and interpolation distortions.

Norms along a configuration ``P`` use the averaging measure ``delta_P``
(masses ``1/N``). Sup norms over ``K`` are taken over the candidate grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .bergman import growth_fit, rho_values
from .configurations import weighted_rows
from .errors import ConvergenceError, DomainError, SingularError
from .gram import gram_system
from .measures import Configuration, DiscreteMeasure
from .model_spaces import WeightedSet, adapted_basis, as_points, conversion_matrix, dimension


@dataclass
class OptimalMeasureResult:
    measure: DiscreteMeasure
    sup_rho: float
    iterations: int
    converged: bool
    k: int
    logdet_trace: list = field(default_factory=list, repr=False)

    @property
    def N(self) -> int:
        return dimension(self.measure.model, self.k)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "N": self.N,
            "sup_rho": self.sup_rho,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def optimal_measure_fixed_point(
    wset: WeightedSet,
    k: int,
    tol: float = 1e-3,
    max_iter: int = 10**4,
    oversample: Optional[int] = None,
    raise_on_failure: bool = False,
) -> OptimalMeasureResult:
    """Multiplicative update ``m_i <- m_i rho(x_i) / N`` on the candidate grid.

    Stops once ``sup rho <= N (1 + tol)``. The log-determinant of the Gram
    matrix is checked to be nondecreasing at every step.
    """
    grid = wset.candidates(k, oversample)
    n = dimension(wset.model, k)
    rows = weighted_rows(wset, k, grid)
    V = rows.V
    m = np.full(grid.shape[0], 1.0 / grid.shape[0])
    trace = []
    converged = False
    sup = math.inf
    it = 0
    for it in range(max_iter + 1):
        G = (V.conj().T * m) @ V
        try:
            L = np.linalg.cholesky(G)
        except np.linalg.LinAlgError:
            raise SingularError("grid measure is degenerate for this degree") from None
        W = linalg.solve_triangular(L, V.conj().T, lower=True)
        rho = np.sum(np.abs(W) ** 2, axis=0)
        # canonical log det G = 2 * (log|det| of the rows' square root)
        logdet = 2.0 * rows.canonical_logdet(float(np.sum(np.log(np.real(np.diag(L))))))
        if trace and logdet < trace[-1] - 1e-10 * max(1.0, abs(trace[-1])):
            raise ArithmeticError(f"log det decreased at iteration {it}")
        trace.append(logdet)
        sup = float(rho.max())
        if sup <= n * (1.0 + tol):
            converged = True
            break
        if it == max_iter:
            break
        m = m * rho / n
        m /= m.sum()
    if not converged and raise_on_failure:
        raise ConvergenceError(f"fixed point not reached in {max_iter} iterations", sup / n - 1)
    mu = DiscreteMeasure(grid, m, wset.model)
    return OptimalMeasureResult(mu, sup, it, converged, k, trace)


@dataclass
class LagrangeSystem:
    """Lagrange sections ``e_i`` with ``e_i(x_j) = delta_ij``."""

    wset: WeightedSet
    k: int
    config: Configuration
    inverse: np.ndarray  # adapted-basis evaluation matrix at P, inverted

    @property
    def coefficients(self) -> np.ndarray:
        """Rows: canonical-basis coefficients of ``e_1, ..., e_N``."""
        C = conversion_matrix(self.wset, self.k)
        return (C @ self.inverse).T

    def values(self, points) -> np.ndarray:
        """Unweighted ``e_i(x)``; shape ``(n, N)``."""
        B, _ = adapted_basis(self.wset, self.k, points)
        return B @ self.inverse

    def weighted_values(self, points) -> np.ndarray:
        """``|e_i(x)| e^{-k phi(x) + k phi(x_i)}``."""
        pts = as_points(self.wset.model, points)
        phi = self.wset.weight(pts)
        phi_p = self.wset.weight(self.config.points)
        E = np.abs(self.values(pts))
        return E * np.exp(-self.k * (phi[:, None] - phi_p[None, :]))


def _as_config(wset: WeightedSet, P) -> Configuration:
    if isinstance(P, Configuration):
        return P
    return Configuration(as_points(wset.model, P), wset.model)


def lagrange_system(wset: WeightedSet, k: int, P) -> LagrangeSystem:
    config = _as_config(wset, P)
    n = dimension(wset.model, k)
    if len(config) != n:
        raise ValueError(f"need N_{k} = {n} nodes, got {len(config)}")
    B, _ = adapted_basis(wset, k, config.points)
    cond = np.linalg.cond(B)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularError("interpolation nodes are degenerate")
    return LagrangeSystem(wset, k, config, np.linalg.inv(B))


def _eval_points(wset: WeightedSet, k: int, config: Configuration, grid) -> np.ndarray:
    if grid is None:
        grid = wset.candidates(k)
    return np.concatenate([as_points(wset.model, grid), config.points])


def lebesgue_constant(wset: WeightedSet, k: int, P, grid=None) -> float:
    """Weighted Lebesgue constant ``max_x sum_i |e_i(x)| e^{-k phi(x) + k phi(x_i)}``."""
    lag = lagrange_system(wset, k, P)
    pts = _eval_points(wset, k, lag.config, grid)
    return float(lag.weighted_values(pts).sum(axis=1).max())


class Pair(enum.Enum):
    INF_INF = "InfInf"
    INF_2 = "Inf2"
    TWO_TWO = "TwoTwo"
    INF_1 = "Inf1Bound"


def distortion(
    wset: WeightedSet,
    k: int,
    mu: Optional[DiscreteMeasure],
    P,
    pair: Pair,
    grid=None,
) -> float:
    """Norm distortion between ``L^p(mu, k phi)`` (or the grid sup) and ``L^q(delta_P)``.

    ``InfInf``: Lebesgue constant. ``Inf2``: ``sqrt(sup rho(delta_P))``.
    ``TwoTwo``: square root of the top generalized eigenvalue of
    ``G(mu)`` against ``G(delta_P)``. ``Inf1Bound``: the exact grid value
    ``N max_{x, i} |e_i(x)|`` of the sup-to-L1 distortion, which is at most
    ``N`` for Fekete nodes.
    """
    pair = Pair(pair)
    config = _as_config(wset, P)
    if pair is Pair.INF_INF:
        return lebesgue_constant(wset, k, config, grid)
    if pair is Pair.INF_1:
        lag = lagrange_system(wset, k, config)
        pts = _eval_points(wset, k, config, grid)
        return float(len(config) * lag.weighted_values(pts).max())
    gs_p = gram_system(wset, config.as_measure(), k, check_support=False)
    if gs_p.singular:
        raise SingularError("configuration is degenerate")
    if pair is Pair.INF_2:
        pts = _eval_points(wset, k, config, grid)
        return math.sqrt(float(rho_values(gs_p, pts).max()))
    if mu is None:
        raise DomainError("TwoTwo distortion needs a measure")
    gs_mu = gram_system(wset, mu, k)
    gs_mu.require_nonsingular()
    M = linalg.solve_triangular(gs_p.R, gs_mu.R.T, trans="T", lower=False).T
    top = np.linalg.norm(M, 2) ** 2 * math.exp(-2.0 * k * (gs_mu.phi_shift - gs_p.phi_shift))
    return math.sqrt(top)


@dataclass
class DistortionReport:
    degrees: list
    values: list
    pair: str
    poly_exponent: float
    exp_rate: float
    subexponential: bool

    def to_json(self) -> dict:
        return {
            "degrees": list(self.degrees),
            "values": list(self.values),
            "pair": self.pair,
            "poly_exponent": self.poly_exponent,
            "exp_rate": self.exp_rate,
            "subexponential": self.subexponential,
        }


def distortion_growth_report(
    wset: WeightedSet,
    k_list: Sequence[int],
    mu,
    configs: Sequence,
    pair: Pair,
    rate_threshold: float = 0.01,
) -> DistortionReport:
    """Per-degree distortions with the same growth fit as the BM diagnostic.

    ``mu`` is a measure, a per-degree sequence of measures, or None.
    """
    k_list = list(k_list)
    if len(k_list) < 3:
        raise ValueError("need at least 3 degrees")
    if len(configs) != len(k_list):
        raise ValueError("one configuration per degree is required")
    pair = Pair(pair)
    vals = []
    for i, (k, P) in enumerate(zip(k_list, configs)):
        m = mu[i] if isinstance(mu, (list, tuple)) else mu
        vals.append(distortion(wset, k, m, P, pair))
    dims = [dimension(wset.model, k) for k in k_list]
    poly, rate = growth_fit(k_list, dims, vals)
    return DistortionReport(k_list, vals, pair.value, poly, rate, bool(rate <= rate_threshold))
