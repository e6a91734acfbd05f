"""Discrete measures, point configurations, reference equilibrium laws.

Also hosts the discretized weighted-energy minimizer used as an independent
oracle for one-dimensional equilibrium measures, and the weak-convergence
surrogates (Kolmogorov-Smirnov distance, harmonic moment discrepancy).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import linalg

from .errors import ConvergenceError, DomainError
from .model_spaces import (
    COMPLEX_LINE,
    Kind,
    ModelSpace,
    SupportKind,
    WeightedSet,
    WeightKind,
    as_points,
    chebyshev_gauss,
    equispaced_circle,
    real_harmonics,
)

MASS_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms with nonnegative masses summing to one."""

    atoms: np.ndarray
    masses: np.ndarray
    model: ModelSpace = COMPLEX_LINE

    def __post_init__(self):
        atoms = as_points(self.model, self.atoms)
        masses = np.asarray(self.masses, dtype=float).ravel()
        if atoms.shape[0] != masses.size:
            raise ValueError(f"{atoms.shape[0]} atoms but {masses.size} masses")
        if np.any(masses < 0) or not np.all(np.isfinite(masses)):
            raise ValueError("masses must be finite and nonnegative")
        if abs(masses.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {masses.sum()!r}, not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def normalized(cls, atoms, weights, model: ModelSpace = COMPLEX_LINE) -> "DiscreteMeasure":
        w = np.asarray(weights, dtype=float)
        return cls(atoms, w / w.sum(), model)

    @classmethod
    def uniform(cls, atoms, model: ModelSpace = COMPLEX_LINE) -> "DiscreteMeasure":
        n = as_points(model, atoms).shape[0]
        return cls(atoms, np.full(n, 1.0 / n), model)

    def __len__(self):
        return self.masses.size

    def integrate(self, f: Callable) -> float:
        return integrate(self, f)

    def mix(self, other: "DiscreteMeasure", t: float) -> "DiscreteMeasure":
        """``(1 - t) self + t other`` on the concatenated atoms."""
        atoms = np.concatenate([self.atoms, other.atoms])
        masses = np.concatenate([(1.0 - t) * self.masses, t * other.masses])
        return DiscreteMeasure.normalized(atoms, masses, self.model)


@dataclass(frozen=True)
class Configuration:
    points: np.ndarray
    model: ModelSpace = COMPLEX_LINE

    def __post_init__(self):
        object.__setattr__(self, "points", as_points(self.model, self.points))

    def __len__(self):
        return self.points.shape[0]

    def as_measure(self) -> DiscreteMeasure:
        n = len(self)
        return DiscreteMeasure(self.points, np.full(n, 1.0 / n), self.model)


def integrate(mu: DiscreteMeasure, f: Callable) -> float:
    vals = np.asarray(f(mu.atoms))
    if vals.ndim == 0:
        vals = np.full(len(mu), float(vals))
    if not np.all(np.isfinite(vals)):
        raise ArithmeticError("integrand is not finite on every atom")
    return float(np.dot(mu.masses, vals))


# --------------------------------------------------------------------------
# reference laws


class LawKind(enum.Enum):
    ARCSINE = "ArcsineInterval"
    UNIFORM_CIRCLE = "UniformCircle"
    UNIFORM_SPHERE = "UniformSphere"
    ORACLE_TABLE = "OracleTable"


@dataclass(frozen=True)
class ReferenceLaw:
    kind: LawKind
    radius: float = 1.0
    table: Optional[DiscreteMeasure] = field(default=None, compare=False)
    # "interval" or "circle": how points map to the CDF parameter
    geometry: str = "interval"

    @classmethod
    def arcsine(cls) -> "ReferenceLaw":
        return cls(LawKind.ARCSINE)

    @classmethod
    def uniform_circle(cls, r: float = 1.0) -> "ReferenceLaw":
        return cls(LawKind.UNIFORM_CIRCLE, radius=r, geometry="circle")

    @classmethod
    def uniform_sphere(cls) -> "ReferenceLaw":
        return cls(LawKind.UNIFORM_SPHERE, geometry="sphere")

    @classmethod
    def oracle_table(cls, mu: DiscreteMeasure, geometry: str) -> "ReferenceLaw":
        return cls(LawKind.ORACLE_TABLE, table=mu, geometry=geometry)

    def cdf(self, t: np.ndarray) -> np.ndarray:
        """CDF in the 1-D parameter (x on the interval, angle on a circle)."""
        t = np.asarray(t, dtype=float)
        if self.kind is LawKind.ARCSINE:
            return 0.5 + np.arcsin(np.clip(t, -1.0, 1.0)) / np.pi
        if self.kind is LawKind.UNIFORM_CIRCLE:
            return np.clip(t / (2.0 * np.pi), 0.0, 1.0)
        if self.kind is LawKind.ORACLE_TABLE:
            s, m = _sorted_params(self.table, self.geometry)
            cum = np.cumsum(m)
            idx = np.searchsorted(s, t, side="right")
            return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
        raise DomainError("sphere law has no 1-D CDF")


def parameter(points: np.ndarray, geometry: str) -> np.ndarray:
    if geometry == "interval":
        return np.real(points)
    if geometry == "circle":
        return np.mod(np.angle(points), 2.0 * np.pi)
    raise DomainError(f"no 1-D parameter for geometry {geometry!r}")


def _sorted_params(mu: DiscreteMeasure, geometry: str):
    t = parameter(mu.atoms, geometry)
    order = np.argsort(t, kind="stable")
    return t[order], mu.masses[order]


def ks_distance(mu: DiscreteMeasure, law: ReferenceLaw) -> float:
    """Sup-distance between CDFs; rotation-minimized on circles.

    On a circle, rotating the law shifts ``F_mu - F_law`` by a constant,
    so the minimum over rotations is half the range of the difference.
    """
    if law.kind is LawKind.UNIFORM_SPHERE or law.geometry == "sphere":
        raise DomainError("ks_distance is 1-D only; use harmonic_discrepancy on the sphere")
    t, m = _sorted_params(mu, law.geometry)
    if law.kind is LawKind.ORACLE_TABLE:
        s, _ = _sorted_params(law.table, law.geometry)
        pts = np.union1d(t, s)
        idx = np.searchsorted(t, pts, side="right")
        cum = np.concatenate([[0.0], np.cumsum(m)])
        diff = cum[idx] - law.cdf(pts)
    else:
        cum = np.cumsum(m)
        right = cum
        left = cum - m
        f = law.cdf(t)
        diff = np.concatenate([right - f, left - f])
    if law.geometry == "circle":
        return float(0.5 * (diff.max() - diff.min()))
    return float(np.max(np.abs(diff)))


def harmonic_discrepancy(mu: DiscreteMeasure, degree: int) -> float:
    """L2 size of the harmonic moments of degrees 1..L (surface-area normalization)."""
    if mu.model.kind is not Kind.SPHERE2:
        raise DomainError("harmonic_discrepancy needs a sphere measure")
    Y = real_harmonics(degree, mu.atoms)
    moments = mu.masses @ Y[:, 1:]
    return float(np.sqrt(np.sum(moments * moments)))


# --------------------------------------------------------------------------
# equilibrium measures


def reference_equilibrium(wset: WeightedSet, grid_size: int = 2000) -> ReferenceLaw:
    kind = wset.support.kind
    # constant weights leave the equilibrium measure unchanged
    unweighted = wset.weight.kind is WeightKind.ZERO
    if kind is SupportKind.SPHERE:
        return ReferenceLaw.uniform_sphere()
    if unweighted:
        if kind is SupportKind.INTERVAL:
            return ReferenceLaw.arcsine()
        if kind in (SupportKind.CIRCLE, SupportKind.DISK):
            return ReferenceLaw.uniform_circle(wset.support.radius)
    if kind in (SupportKind.INTERVAL, SupportKind.CIRCLE):
        res = equilibrium_oracle(wset, grid_size)
        geometry = "interval" if kind is SupportKind.INTERVAL else "circle"
        return ReferenceLaw.oracle_table(res.measure, geometry)
    raise DomainError(f"no equilibrium law available for {wset.support.label()} with a weight")


@dataclass
class OracleResult:
    measure: DiscreteMeasure
    energy: float
    offdiag_energy: float
    gap: float
    iterations: int
    energies: list


def _oracle_grid(wset: WeightedSet, m: int):
    """Nodes and cell lengths: Chebyshev cells on [-1, 1], equal arcs on a circle."""
    if wset.support.kind is SupportKind.INTERVAL:
        x = chebyshev_gauss(m)
        edges = -np.cos(np.arange(m + 1) * np.pi / m)
        return x.astype(complex), np.diff(edges)
    r = wset.support.radius
    return equispaced_circle(m, r), np.full(m, 2.0 * np.pi * r / m)


def log_kernel(points: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """Collocated ``log 1/|x - y|`` with the self-energy of a uniform cell on the diagonal."""
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, 1.0)
    K = -np.log(d)
    # (1/h^2) int_0^h int_0^h log(1/|s-t|) ds dt = log(1/h) + 3/2
    K[np.diag_indices_from(K)] = np.log(1.0 / cells) + 1.5
    return K


def _kkt_solve(K: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Minimize x'Kx + 2q'x subject to sum(x) = 1 (no sign constraint)."""
    c = linalg.cho_factor(K, lower=True, check_finite=False)
    u = linalg.cho_solve(c, np.ones(q.size), check_finite=False)
    v = linalg.cho_solve(c, q, check_finite=False)
    half_lam = (1.0 + v.sum()) / u.sum()
    return half_lam * u - v


def equilibrium_oracle(
    wset: WeightedSet, grid_size: int = 2000, tol: float = 1e-6, max_iter: int = 500
) -> OracleResult:
    """Minimize the discretized weighted logarithmic energy over the simplex.

    ``E(m) = sum_{i,j} m_i m_j K_ij + 2 sum_i m_i Q(x_i)`` with ``K`` from
    :func:`log_kernel`. Primal active-set iterations: each step moves
    toward the equality-constrained minimizer on the working set, so the
    energy never increases. Stops when the Frank-Wolfe gap
    ``m.g - min(g)`` is at most ``tol``.
    """
    if wset.model.kind is not Kind.COMPLEX_LINE or wset.support.kind not in (
        SupportKind.INTERVAL,
        SupportKind.CIRCLE,
    ):
        raise DomainError("the energy oracle handles the interval and circles only")
    x, cells = _oracle_grid(wset, grid_size)
    K = log_kernel(x, cells)
    q = wset.weight(x)
    # on the simplex m'(K + c 11')m = m'Km + c: same minimizer, and the
    # shifted kernel is positive definite once c dominates log(diameter)
    shift = 1.0 + max(0.0, math.log(2.0 * np.abs(x).max()))
    Ks = K + shift

    def energy(m):
        return float(m @ K @ m + 2.0 * q @ m)

    # initial working set: iterate the unconstrained solve and keep its positive part
    work = np.arange(grid_size)
    for _ in range(100):
        sol = _kkt_solve(Ks[np.ix_(work, work)], q[work])
        keep = sol > 0
        if keep.all():
            break
        work = work[keep]
    m = np.zeros(grid_size)
    m[work] = 1.0 / work.size
    energies = [energy(m)]
    gap = math.inf
    for it in range(1, max_iter + 1):
        sol = _kkt_solve(Ks[np.ix_(work, work)], q[work])
        d = sol - m[work]
        neg = d < 0
        ratios = np.full(work.size, np.inf)
        ratios[neg] = -m[work][neg] / d[neg]
        alpha = min(1.0, float(ratios.min()))
        m[work] = m[work] + alpha * d
        if alpha < 1.0:
            block = int(np.argmin(ratios))
            m[work[block]] = 0.0
            m[m < 0] = 0.0
            work = np.delete(work, block)
        m /= m.sum()
        e = energy(m)
        if e > energies[-1] + 1e-12 * max(1.0, abs(energies[-1])):
            raise ConvergenceError(f"energy increased at iteration {it}", gap)
        energies.append(e)
        if alpha < 1.0:
            continue
        g = 2.0 * (K @ m + q)
        gap = float(m @ g - g.min())
        if gap <= tol:
            mu = DiscreteMeasure(x, m / m.sum(), wset.model)
            off = e - float(np.sum(np.diag(K) * m * m))
            return OracleResult(mu, e, off, gap, it, energies)
        outside = np.setdiff1d(np.arange(grid_size), work)
        add = outside[np.argmin(g[outside])]
        work = np.sort(np.append(work, add))
    raise ConvergenceError(f"energy oracle did not converge in {max_iter} iterations", gap)


# --------------------------------------------------------------------------
# CSV serialization


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_measure_csv(path, mu: DiscreteMeasure) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if mu.model.kind is Kind.COMPLEX_LINE:
            w.writerow(["index", "x_re", "x_im", "mass"])
            for i, (z, m) in enumerate(zip(mu.atoms, mu.masses)):
                w.writerow([i, _fmt(z.real), _fmt(z.imag), _fmt(m)])
        else:
            w.writerow(["index", "x", "y", "z", "mass"])
            for i, (p, m) in enumerate(zip(mu.atoms, mu.masses)):
                w.writerow([i, _fmt(p[0]), _fmt(p[1]), _fmt(p[2]), _fmt(m)])


def read_measure_csv(path) -> DiscreteMeasure:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    masses = np.array([float(r["mass"]) for r in rows])
    if rows and "x_re" in rows[0]:
        atoms = np.array([complex(float(r["x_re"]), float(r["x_im"])) for r in rows])
        return DiscreteMeasure(atoms, masses, COMPLEX_LINE)
    from .model_spaces import SPHERE2

    atoms = np.array([[float(r["x"]), float(r["y"]), float(r["z"])] for r in rows])
    return DiscreteMeasure(atoms, masses, SPHERE2)


def write_configuration_csv(path, config: Configuration) -> None:
    write_measure_csv(path, config.as_measure())
