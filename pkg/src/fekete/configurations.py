"""Weighted Vandermonde determinants and point-configuration searches.

Every search is restricted to a finite candidate grid and is deterministic:
near-ties (relative 1e-12) are resolved toward the lowest grid index.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .errors import DomainError, SingularError
from .gram import GramSystem, gram_system
from .measures import Configuration, DiscreteMeasure
from .model_spaces import WeightedSet, adapted_basis, as_points, dimension

TIE_RTOL = 1e-12


class Method(enum.Enum):
    GREEDY_ONLY = "GreedyOnly"
    GREEDY_PLUS_EXCHANGE = "GreedyPlusExchange"
    LEJA = "Leja"
    RECURSIVE_EXTREMAL = "RecursiveExtremal"


def argmax_lowest(values: np.ndarray, mask: Optional[np.ndarray] = None) -> int:
    """Index of the maximum, preferring the lowest index among near-ties."""
    v = np.where(mask, values, -np.inf) if mask is not None else values
    top = v.max()
    return int(np.flatnonzero(v >= top - TIE_RTOL * abs(top))[0])


@dataclass
class WeightedRows:
    """Adapted basis times ``e^{-k(phi - shift)}`` at a set of points."""

    V: np.ndarray
    shift: float
    logdet_c: float
    k: int

    def canonical_logdet(self, log_abs_det_rows: float) -> float:
        """Convert ``log|det V[P]|`` into ``log|det S_k(P)|_{k phi}``."""
        n = self.V.shape[1]
        return log_abs_det_rows - self.k * n * self.shift - self.logdet_c


def weighted_rows(wset: WeightedSet, k: int, points, shift: Optional[float] = None) -> WeightedRows:
    pts = as_points(wset.model, points)
    phi = wset.weight(pts)
    if shift is None:
        shift = float(phi.min())
    B, ldc = adapted_basis(wset, k, pts)
    return WeightedRows(B * np.exp(-k * (phi - shift))[:, None], shift, ldc, k)


def _log_abs_det(M: np.ndarray) -> float:
    sign, logabs = np.linalg.slogdet(M)
    return float(logabs) if sign != 0 else -math.inf


def _has_repeats(pts: np.ndarray) -> bool:
    if pts.ndim == 1:
        return np.unique(pts).size < pts.size
    return np.unique(pts, axis=0).shape[0] < pts.shape[0]


def weighted_vandermonde(
    wset: WeightedSet, k: int, P, basis: Optional[np.ndarray] = None
) -> float:
    """``log|det(s_i(x_j))| - k sum phi(x_j)``.

    ``basis`` optionally gives alternative sections as rows of canonical
    coefficients; the default is the canonical (reference-orthonormal) basis.
    Degenerate configurations return ``-inf``.
    """
    pts = P.points if isinstance(P, Configuration) else as_points(wset.model, P)
    n = dimension(wset.model, k)
    if pts.shape[0] != n:
        raise ValueError(f"configuration has {pts.shape[0]} points, need N_{k} = {n}")
    if _has_repeats(pts):
        return -math.inf
    rows = weighted_rows(wset, k, pts)
    value = rows.canonical_logdet(_log_abs_det(rows.V))
    if basis is not None and math.isfinite(value):
        value += _log_abs_det(np.asarray(basis).T)
    return value


@dataclass
class FeketeResult:
    config: Configuration
    log_abs_det_weighted: float
    method: Method
    iterations: int
    converged: bool
    k: int
    indices: Optional[np.ndarray] = None
    grid: Optional[np.ndarray] = field(default=None, repr=False)
    logdet_trace: list = field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.config)


def _greedy(V: np.ndarray, n: int) -> list:
    """Determinant-increment greedy: row-pivoted Gram-Schmidt on ``V``."""
    R = V.astype(complex, copy=True)
    norms = np.sum(np.abs(R) ** 2, axis=1)
    free = np.ones(V.shape[0], dtype=bool)
    chosen = []
    for _ in range(n):
        i = argmax_lowest(norms, free)
        if norms[i] <= 0:
            raise SingularError("candidate grid is degenerate for this degree")
        q = R[i] / math.sqrt(norms[i])
        R -= np.outer(R @ q.conj(), q)
        norms = np.sum(np.abs(R) ** 2, axis=1)
        free[i] = False
        chosen.append(i)
    return chosen


def _exchange(V: np.ndarray, idx: list, tol: float, max_sweeps: int):
    """Cyclic single-point exchange; returns (idx, sweeps, converged, trace)."""
    n = len(idx)
    trace = [_log_abs_det(V[idx])]
    for sweep in range(1, max_sweeps + 1):
        # Z[y, i] = det with row i replaced by candidate y, over the current det
        Z = linalg.solve(V[idx].T, V.T).T
        swapped = False
        for i in range(n):
            col = np.abs(Z[:, i])
            y = argmax_lowest(col)
            if y != idx[i] and math.log(col[y]) > tol:
                zy = Z[y].copy()
                zy[i] -= 1.0
                Z -= np.outer(Z[:, i] / Z[y, i], zy)
                idx[i] = y
                swapped = True
        trace.append(_log_abs_det(V[idx]))
        if trace[-1] < trace[-2] - 1e-9 * max(1.0, abs(trace[-2])):
            raise ArithmeticError("exchange sweep decreased the determinant")
        if not swapped:
            return idx, sweep, True, trace
    return idx, max_sweeps, False, trace


def fekete_search(
    wset: WeightedSet,
    k: int,
    exchange_tol: float = 1e-12,
    max_sweeps: int = 200,
    oversample: Optional[int] = None,
    exchange: bool = True,
) -> FeketeResult:
    """Greedy start plus single-point exchange over the candidate grid.

    A converged result is certified locally maximal: no single point can be
    replaced by a grid point to raise ``log|det|`` by more than ``exchange_tol``.
    """
    grid = wset.candidates(k, oversample)
    n = dimension(wset.model, k)
    if grid.shape[0] < n:
        raise DomainError(f"grid of {grid.shape[0]} points is smaller than N_{k} = {n}")
    rows = weighted_rows(wset, k, grid)
    idx = _greedy(rows.V, n)
    sweeps, converged, trace = 0, True, [_log_abs_det(rows.V[idx])]
    method = Method.GREEDY_ONLY
    if exchange:
        idx, sweeps, converged, trace = _exchange(rows.V, idx, exchange_tol, max_sweeps)
        method = Method.GREEDY_PLUS_EXCHANGE
    idx = np.array(idx)
    value = rows.canonical_logdet(trace[-1])
    return FeketeResult(
        Configuration(grid[idx], wset.model),
        value,
        method,
        sweeps,
        converged,
        k,
        idx,
        grid,
        [rows.canonical_logdet(t) for t in trace],
    )


def exchange_certificate(wset: WeightedSet, result: FeketeResult) -> float:
    """Largest ``log|det|`` gain from any single-point grid replacement."""
    rows = weighted_rows(wset, result.k, result.grid)
    Z = linalg.solve(rows.V[result.indices].T, rows.V.T).T
    return float(np.log(np.abs(Z).max()))


def _leja_indices(V: np.ndarray, n: int) -> list:
    free = np.ones(V.shape[0], dtype=bool)
    chosen = [argmax_lowest(np.abs(V[:, 0]), free)]
    free[chosen[0]] = False
    for j in range(1, n):
        coef = linalg.solve(V[chosen, :j], V[chosen, j])
        resid = np.abs(V[:, j] - V[:, :j] @ coef)
        i = argmax_lowest(resid, free)
        if resid[i] <= 0:
            raise SingularError("candidate grid is degenerate for this degree")
        free[i] = False
        chosen.append(i)
    return chosen


def leja_sequence(wset: WeightedSet, k: int, oversample: Optional[int] = None) -> Configuration:
    """Nested greedy sequence: point ``j+1`` maximizes the determinant of the first ``j+1`` sections."""
    return leja_result(wset, k, oversample).config


def leja_result(wset: WeightedSet, k: int, oversample: Optional[int] = None) -> FeketeResult:
    grid = wset.candidates(k, oversample)
    n = dimension(wset.model, k)
    rows = weighted_rows(wset, k, grid)
    idx = np.array(_leja_indices(rows.V, n))
    value = rows.canonical_logdet(_log_abs_det(rows.V[idx]))
    return FeketeResult(Configuration(grid[idx], wset.model), value, Method.LEJA, n, True, k, idx, grid)


@dataclass
class RecursiveTrace:
    """Output of the recursively extremal construction.

    Steps run from ``j = N`` down to 1; ``points[0]`` is ``x_N``.
    ``sections`` holds, per step, the coefficients of ``s_j`` in the
    ``(mu, k phi)``-orthonormal basis of ``gram``.
    """

    points: np.ndarray
    sections: np.ndarray
    rho_values: np.ndarray
    eval_matrix: np.ndarray  # [i, j] = s_i(x_j) e^{-k phi(x_j)}, steps numbered 1..N
    gram: GramSystem = field(repr=False)
    indices: Optional[np.ndarray] = None

    @property
    def k(self) -> int:
        return self.gram.k

    @property
    def N(self) -> int:
        return self.rho_values.size

    @property
    def config(self) -> Configuration:
        return Configuration(self.points[::-1], self.gram.wset.model)

    @property
    def log_abs_det_weighted(self) -> float:
        """``log|det S(P)|_{k phi}`` for the ``(mu, k phi)``-orthonormal basis S."""
        return 0.5 * float(np.sum(np.log(self.rho_values)))

    @property
    def log_abs_det_reference(self) -> float:
        """Same determinant in the reference-orthonormal basis."""
        return self.log_abs_det_weighted + 0.5 * self.gram.logdet


def _householder_complement(w: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the complement of unit vector ``w``."""
    j = w.size
    alpha = -(w[0] / abs(w[0]) if w[0] != 0 else 1.0)
    v = w.astype(complex, copy=True)
    v[0] -= alpha
    nv = np.vdot(v, v).real
    H = np.eye(j, dtype=complex)
    if nv > 0:
        H -= 2.0 * np.outer(v, v.conj()) / nv
    return H[:, 1:]


def recursively_extremal(
    wset: WeightedSet, mu: DiscreteMeasure, k: int, oversample: Optional[int] = None
) -> RecursiveTrace:
    """Greedy maximization of the distortion function of shrinking subspaces.

    Candidates are the set's grid followed by the atoms of ``mu``, so the
    maximum is taken over a superset of the support of ``mu``.
    """
    gs = gram_system(wset, mu, k)
    gs.require_nonsingular()
    n = gs.N
    cands = np.concatenate([wset.candidates(k, oversample), mu.atoms])
    T = gs.sections(cands) * np.exp(-k * wset.weight(cands))[:, None]
    U = np.eye(n, dtype=complex)
    order, rhos, secs = [], [], []
    for _ in range(n):
        H = T @ U
        rho = np.sum(np.abs(H) ** 2, axis=1)
        y = argmax_lowest(rho)
        s = U @ H[y].conj() / math.sqrt(rho[y])
        order.append(y)
        rhos.append(rho[y])
        secs.append(s)
        if U.shape[1] > 1:
            w = U.conj().T @ s
            U = U @ _householder_complement(w / np.linalg.norm(w))
    order = np.array(order)
    S = np.array(secs)  # step-ordered: row 0 is s_N
    E = (T[order] @ S.T).T  # E[a, b] = s_a(x_b), step order
    # reverse so that index 1 is the last step
    E = E[::-1, ::-1]
    return RecursiveTrace(cands[order], S, np.array(rhos)[::-1], E, gs, order)


def k_diameter(wset: WeightedSet, k: int, result) -> float:
    """``-(1/(k N)) log|det S_k(P)|_{k phi}`` for the best configuration found.

    An upper bound for the true k-diameter, since the search is grid-restricted.
    Recursive traces are converted to the canonical (reference-orthonormal) basis.
    """
    if k < 1:
        raise ValueError("k-diameter needs k >= 1")
    value = getattr(result, "log_abs_det_reference", result.log_abs_det_weighted)
    if not math.isfinite(value):
        raise SingularError("degenerate configuration has no k-diameter")
    return -value / (k * dimension(wset.model, k))


@dataclass
class AsymptoticFeketeCheck:
    degrees: list
    values: list
    liminf_estimate: float

    @property
    def passes(self) -> bool:
        return self.liminf_estimate >= 0


def asymptotic_fekete_check(results: Sequence) -> AsymptoticFeketeCheck:
    """Normalized log-determinants ``(1/(k N)) log|det S_k(P_k)|_{k phi}`` per degree.

    The liminf estimate is the minimum over the upper half of the degrees.
    """
    if len(results) < 3:
        raise ValueError("need at least 3 degrees")
    ks = [r.k for r in results]
    vals = [r.log_abs_det_weighted / (r.k * r.N) for r in results]
    top = sorted(zip(ks, vals))[len(ks) // 2 :]
    return AsymptoticFeketeCheck(ks, vals, min(v for _, v in top))
