"""Concrete model spaces, weights and weighted sets.

Two models are supported:

* ``COMPLEX_LINE``: polynomials of degree <= k in one complex variable,
  canonical basis the monomials ``z**j`` (orthonormal for normalized
  arclength on the unit circle).
* ``SPHERE2``: real spherical polynomials of degree <= k on S^2, canonical
  basis the real spherical harmonics ``Y_lm`` scaled to be orthonormal for
  the uniform probability measure.

Points are numpy arrays: complex of shape ``(n,)`` on the line, real of
shape ``(n, 3)`` on the sphere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

SPHERE_TOL = 1e-12


class Kind(enum.Enum):
    COMPLEX_LINE = "ComplexLine"
    SPHERE2 = "Sphere2"


@dataclass(frozen=True)
class ModelSpace:
    kind: Kind
    description: str = ""

    def dimension(self, k: int) -> int:
        return dimension(self, k)


COMPLEX_LINE = ModelSpace(Kind.COMPLEX_LINE, "polynomials in one complex variable")
SPHERE2 = ModelSpace(Kind.SPHERE2, "real spherical polynomials on S^2")


def dimension(model: ModelSpace, k: int) -> int:
    """Number of sections N_k of the degree-k space."""
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    if model.kind is Kind.COMPLEX_LINE:
        return k + 1
    return (k + 1) ** 2


def as_points(model: ModelSpace, x) -> np.ndarray:
    """Coerce ``x`` to the point-array layout of ``model``."""
    if model.kind is Kind.COMPLEX_LINE:
        return np.atleast_1d(np.asarray(x, dtype=complex)).ravel()
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if pts.shape[-1] != 3:
        raise DomainError(f"sphere points need 3 coordinates, got shape {pts.shape}")
    norms = np.linalg.norm(pts, axis=1)
    bad = np.abs(norms - 1.0) > SPHERE_TOL
    if np.any(bad):
        raise DomainError(f"sphere point off the unit sphere (|x| = {norms[bad][0]!r})")
    return pts


# --------------------------------------------------------------------------
# real spherical harmonics


def real_harmonics(lmax: int, xyz: np.ndarray) -> np.ndarray:
    """Real spherical harmonics Y_lm, l <= lmax, orthonormal for surface area.

    Columns are ordered by l, then m = -l..l. Uses the fully normalized
    associated Legendre recurrence (no Condon-Shortley phase).
    """
    xyz = np.atleast_2d(xyz)
    ct = np.clip(xyz[:, 2], -1.0, 1.0)
    st = np.hypot(xyz[:, 0], xyz[:, 1])
    az = np.arctan2(xyz[:, 1], xyz[:, 0])
    n = xyz.shape[0]
    # pbar[l][m] for 0 <= m <= l
    pbar = [[None] * (l + 1) for l in range(lmax + 1)]
    pbar[0][0] = np.full(n, 1.0 / math.sqrt(4.0 * math.pi))
    for m in range(1, lmax + 1):
        pbar[m][m] = math.sqrt((2 * m + 1) / (2.0 * m)) * st * pbar[m - 1][m - 1]
    for m in range(0, lmax):
        pbar[m + 1][m] = math.sqrt(2 * m + 3) * ct * pbar[m][m]
    for m in range(0, lmax + 1):
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            pbar[l][m] = a * (ct * pbar[l - 1][m] - b * pbar[l - 2][m])
    out = np.empty((n, (lmax + 1) ** 2))
    col = 0
    sq2 = math.sqrt(2.0)
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            if m < 0:
                out[:, col] = sq2 * pbar[l][-m] * np.sin(-m * az)
            elif m == 0:
                out[:, col] = pbar[l][0]
            else:
                out[:, col] = sq2 * pbar[l][m] * np.cos(m * az)
            col += 1
    return out


# --------------------------------------------------------------------------
# canonical basis


def basis_matrix(model: ModelSpace, k: int, points) -> np.ndarray:
    """Canonical basis evaluated at each point; shape ``(n, N_k)``."""
    pts = as_points(model, points)
    if model.kind is Kind.COMPLEX_LINE:
        out = np.empty((pts.size, k + 1), dtype=complex)
        out[:, 0] = 1.0
        for j in range(1, k + 1):
            out[:, j] = out[:, j - 1] * pts
        return out
    return math.sqrt(4.0 * math.pi) * real_harmonics(k, pts)


def basis_eval(model: ModelSpace, k: int, x) -> np.ndarray:
    """Canonical basis ``(s_1(x), ..., s_N(x))`` at a single point."""
    return basis_matrix(model, k, x)[0]


# --------------------------------------------------------------------------
# weights


class WeightKind(enum.Enum):
    ZERO = "Zero"
    QUADRATIC = "Quadratic"
    LOG_ABS_SHIFT = "LogAbsShift"
    TABULATED = "Tabulated"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class Weight:
    """A continuous weight phi; ``offset`` is an additive constant.

    ``Quadratic(c)`` is ``c |z|^2``, ``LogAbsShift(a)`` is ``log |z - a|``
    (``a`` must stay off the support), ``Tabulated`` interpolates values
    linearly in the real coordinate of the point.
    """

    kind: WeightKind = WeightKind.ZERO
    c: float = 0.0
    a: complex = 0j
    table_x: Optional[tuple] = None
    table_v: Optional[tuple] = None
    func: Optional[Callable] = field(default=None, compare=False)
    offset: float = 0.0

    @classmethod
    def zero(cls) -> "Weight":
        return cls()

    @classmethod
    def quadratic(cls, c: float) -> "Weight":
        return cls(WeightKind.QUADRATIC, c=float(c))

    @classmethod
    def log_abs_shift(cls, a: complex) -> "Weight":
        return cls(WeightKind.LOG_ABS_SHIFT, a=complex(a))

    @classmethod
    def tabulated(cls, x, values) -> "Weight":
        x = np.asarray(x, dtype=float)
        v = np.asarray(values, dtype=float)
        if x.shape != v.shape or x.size < 2 or np.any(np.diff(x) <= 0):
            raise ValueError("tabulated weight needs increasing abscissae matching values")
        if not np.all(np.isfinite(v)):
            raise ValueError("tabulated weight values must be finite")
        return cls(WeightKind.TABULATED, table_x=tuple(x), table_v=tuple(v))

    @classmethod
    def custom(cls, func: Callable) -> "Weight":
        return cls(WeightKind.CUSTOM, func=func)

    @property
    def is_zero(self) -> bool:
        return self.kind is WeightKind.ZERO and self.offset == 0.0

    def shifted(self, c: float) -> "Weight":
        return _replace(self, offset=self.offset + float(c))

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points)
        n = pts.shape[0] if pts.ndim else 1
        if self.kind is WeightKind.ZERO:
            vals = np.zeros(n)
        elif self.kind is WeightKind.QUADRATIC:
            if pts.ndim == 2:
                vals = self.c * np.sum(pts * pts, axis=1)
            else:
                vals = self.c * np.abs(pts) ** 2
        elif self.kind is WeightKind.LOG_ABS_SHIFT:
            d = np.abs(np.atleast_1d(pts) - self.a)
            if np.any(d == 0):
                raise DomainError("log-shift weight is -inf at its pole")
            vals = np.log(d)
        elif self.kind is WeightKind.TABULATED:
            vals = np.interp(np.real(np.atleast_1d(pts)), self.table_x, self.table_v)
        else:
            vals = np.asarray(self.func(pts), dtype=float).reshape(n)
        return np.asarray(vals, dtype=float).reshape(n) + self.offset


def _replace(w: Weight, **changes) -> Weight:
    import dataclasses

    return dataclasses.replace(w, **changes)


ZERO = Weight.zero()


# --------------------------------------------------------------------------
# supports and weighted sets


class SupportKind(enum.Enum):
    INTERVAL = "IntervalMinus1To1"
    CIRCLE = "CircleRadius"
    DISK = "ClosedDiskRadius"
    SPHERE = "SphereFull"
    CLOUD = "CustomPointCloud"


@dataclass(frozen=True)
class Support:
    kind: SupportKind
    radius: float = 1.0
    points: Optional[np.ndarray] = field(default=None, compare=False)

    def contains(self, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        if self.kind is SupportKind.INTERVAL:
            return (np.abs(pts.imag) <= tol) & (np.abs(pts.real) <= 1.0 + tol)
        if self.kind is SupportKind.CIRCLE:
            return np.abs(np.abs(pts) - self.radius) <= tol * max(1.0, self.radius)
        if self.kind is SupportKind.DISK:
            return np.abs(pts) <= self.radius * (1.0 + tol)
        if self.kind is SupportKind.SPHERE:
            return np.abs(np.linalg.norm(pts, axis=1) - 1.0) <= tol
        cloud = self.points
        if cloud.ndim == 1:
            d = np.abs(pts[:, None] - cloud[None, :])
        else:
            d = np.linalg.norm(pts[:, None, :] - cloud[None, :, :], axis=2)
        return np.min(d, axis=1) <= tol

    def label(self) -> str:
        if self.kind in (SupportKind.CIRCLE, SupportKind.DISK):
            return f"{self.kind.value}({self.radius:g})"
        return self.kind.value


@dataclass(frozen=True)
class WeightedSet:
    """A compact set with a continuous weight and an optional fixed grid.

    When ``grid`` is None, candidate grids are generated per degree by
    :func:`search_grid`.
    """

    model: ModelSpace
    support: Support
    weight: Weight = ZERO
    grid: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.model.kind is Kind.SPHERE2:
            if self.support.kind not in (SupportKind.SPHERE, SupportKind.CLOUD):
                raise DomainError("sphere model supports only the full sphere or a point cloud")
            if self.weight.kind is not WeightKind.ZERO:
                raise DomainError("weighted sphere models are not supported")
        elif self.support.kind is SupportKind.SPHERE:
            raise DomainError("complex-line model cannot live on the sphere")
        if self.grid is not None:
            g = as_points(self.model, self.grid)
            if g.shape[0] == 0:
                raise DomainError("candidate grid is empty")
            self.check_support(g)
            object.__setattr__(self, "grid", g)

    @property
    def is_1d(self) -> bool:
        return self.support.kind in (SupportKind.INTERVAL, SupportKind.CIRCLE, SupportKind.DISK)

    def check_support(self, pts: np.ndarray, tol: float = 1e-12) -> None:
        inside = self.support.contains(pts, tol)
        if not np.all(inside):
            bad = pts[~inside][0]
            raise DomainError(f"point {bad!r} lies outside the support {self.support.label()}")

    def candidates(self, k: int, oversample: Optional[int] = None) -> np.ndarray:
        if self.grid is not None:
            if self.grid.shape[0] < dimension(self.model, k):
                raise DomainError(
                    f"grid of {self.grid.shape[0]} points is smaller than N_{k}"
                    f" = {dimension(self.model, k)}"
                )
            return self.grid
        return search_grid(self, k, oversample)

    def with_weight(self, weight: Weight) -> "WeightedSet":
        return WeightedSet(self.model, self.support, weight, self.grid)

    def with_grid(self, grid) -> "WeightedSet":
        return WeightedSet(self.model, self.support, self.weight, grid)


def interval(weight: Weight = ZERO, grid=None) -> WeightedSet:
    return WeightedSet(COMPLEX_LINE, Support(SupportKind.INTERVAL), weight, grid)


def circle(r: float = 1.0, weight: Weight = ZERO, grid=None) -> WeightedSet:
    if r <= 0:
        raise ValueError("radius must be positive")
    return WeightedSet(COMPLEX_LINE, Support(SupportKind.CIRCLE, float(r)), weight, grid)


def disk(r: float = 1.0, weight: Weight = ZERO, grid=None) -> WeightedSet:
    if r <= 0:
        raise ValueError("radius must be positive")
    return WeightedSet(COMPLEX_LINE, Support(SupportKind.DISK, float(r)), weight, grid)


def sphere(grid=None) -> WeightedSet:
    return WeightedSet(SPHERE2, Support(SupportKind.SPHERE), ZERO, grid)


def point_cloud(model: ModelSpace, points, weight: Weight = ZERO) -> WeightedSet:
    pts = as_points(model, points)
    return WeightedSet(model, Support(SupportKind.CLOUD, points=pts), weight, pts)


# --------------------------------------------------------------------------
# grids


def chebyshev_gauss(n: int) -> np.ndarray:
    """Chebyshev points of the first kind, ascending."""
    j = np.arange(n)
    return -np.cos((2 * j + 1) * np.pi / (2 * n))


def chebyshev_lobatto(n: int) -> np.ndarray:
    """Chebyshev extrema ``cos(j pi / (n - 1))``, starting at +1."""
    if n == 1:
        return np.array([1.0])
    x = np.cos(np.arange(n) * np.pi / (n - 1))
    x[0], x[-1] = 1.0, -1.0
    if n % 2 == 1:
        x[n // 2] = 0.0
    return x


def equispaced_circle(n: int, r: float = 1.0) -> np.ndarray:
    return r * np.exp(2j * np.pi * np.arange(n) / n)


def sphere_product_grid(n_theta: int, n_phi: int):
    """Gauss-Legendre in cos(theta) times uniform azimuth; returns (xyz, masses)."""
    ct, w = np.polynomial.legendre.leggauss(n_theta)
    st = np.sqrt(1.0 - ct * ct)
    az = 2.0 * np.pi * np.arange(n_phi) / n_phi
    xyz = np.stack(
        [
            np.outer(st, np.cos(az)).ravel(),
            np.outer(st, np.sin(az)).ravel(),
            np.repeat(ct, n_phi),
        ],
        axis=1,
    )
    xyz /= np.linalg.norm(xyz, axis=1)[:, None]
    masses = np.repeat(w / 2.0, n_phi) / n_phi
    return xyz, masses


def sphere_grid_shape(k: int, oversample: float) -> tuple:
    target = oversample * (k + 1) ** 2
    n_theta = max(k + 1, math.ceil(math.sqrt(target / 2.0)))
    return n_theta, 2 * n_theta


def _disk_grid(k: int, oversample: int, r: float) -> np.ndarray:
    n_ring = oversample * (k + 1)
    n_rad = max(2, oversample * (k + 1) // 4)
    rings = [np.array([0j])]
    for i in range(1, n_rad + 1):
        rho = r * i / n_rad
        m = max(4, int(round(n_ring * i / n_rad)))
        if i == n_rad:
            m = n_ring
        rings.append(equispaced_circle(m, rho))
    return np.concatenate(rings)


def default_grid(wset: WeightedSet, k: int, oversample: int = 2) -> np.ndarray:
    """Deterministic candidate grid of the documented sizes.

    Interval: ``oversample*(k+1)`` Chebyshev points, ascending. Circle:
    ``oversample*(2k+1)`` equispaced angles from 0. Sphere: product grid with
    at least ``oversample*(k+1)**2`` nodes.
    """
    if oversample < 2:
        raise ValueError("oversample must be >= 2")
    kind = wset.support.kind
    if kind is SupportKind.INTERVAL:
        return chebyshev_gauss(oversample * (k + 1)).astype(complex)
    if kind is SupportKind.CIRCLE:
        return equispaced_circle(oversample * (2 * k + 1), wset.support.radius)
    if kind is SupportKind.DISK:
        return _disk_grid(k, oversample, wset.support.radius)
    if kind is SupportKind.SPHERE:
        return sphere_product_grid(*sphere_grid_shape(k, oversample))[0]
    return wset.support.points


def default_oversample(k: int) -> int:
    return 8 if k <= 20 else 4


def search_grid(wset: WeightedSet, k: int, oversample: Optional[int] = None) -> np.ndarray:
    """Grid used by the point searches.

    Unlike :func:`default_grid` the interval grid contains the endpoints and
    the origin (Chebyshev extrema, odd count, starting at +1), and the circle
    count is rounded up to a multiple of N_k so that a regular N_k-gon is
    available on the grid.
    """
    if oversample is None:
        oversample = default_oversample(k)
    if oversample < 2:
        raise ValueError("oversample must be >= 2")
    kind = wset.support.kind
    n = dimension(wset.model, k)
    if kind is SupportKind.INTERVAL:
        m = oversample * (k + 1)
        m += 1 - m % 2
        return chebyshev_lobatto(m).astype(complex)
    if kind is SupportKind.CIRCLE:
        m = oversample * (2 * k + 1)
        m = n * math.ceil(m / n)
        return equispaced_circle(m, wset.support.radius)
    return default_grid(wset, k, oversample)


# --------------------------------------------------------------------------
# set-adapted working basis


def adapted_basis(wset: WeightedSet, k: int, points) -> tuple:
    """Well-conditioned basis ``b = s C`` of the same space.

    Returns ``(B, logdet_c)`` with ``B`` of shape ``(n, N_k)`` and
    ``logdet_c = log|det C|``. ``C`` is triangular with an explicit diagonal
    so canonical-basis determinants are recovered exactly:
    ``log|det s(P)| = log|det b(P)| - logdet_c``.
    """
    model = wset.model
    pts = as_points(model, points)
    if model.kind is Kind.SPHERE2:
        return basis_matrix(model, k, pts), 0.0
    kind = wset.support.kind
    if kind is SupportKind.INTERVAL:
        # Chebyshev T_j; leading coefficient 2^(j-1) for j >= 1
        out = np.empty((pts.size, k + 1), dtype=complex)
        out[:, 0] = 1.0
        if k >= 1:
            out[:, 1] = pts
        for j in range(2, k + 1):
            out[:, j] = 2.0 * pts * out[:, j - 1] - out[:, j - 2]
        return out, math.log(2.0) * k * (k - 1) / 2.0
    if kind in (SupportKind.CIRCLE, SupportKind.DISK):
        r = wset.support.radius
        out = basis_matrix(model, k, pts / r)
        return out, -math.log(r) * k * (k + 1) / 2.0
    return basis_matrix(model, k, pts), 0.0


def reference_pair(model: ModelSpace, k: int = 64):
    """Reference weighted set and its Bernstein-Markov measure.

    The measure integrates the degree-``k`` Gram matrix exactly.
    """
    from .measures import DiscreteMeasure

    if model.kind is Kind.COMPLEX_LINE:
        m = 2 * k + 2
        wset = circle(1.0)
        return wset, DiscreteMeasure(equispaced_circle(m), np.full(m, 1.0 / m), model)
    xyz, w = sphere_product_grid(k + 1, 2 * k + 2)
    return sphere(), DiscreteMeasure(xyz, w, model)


def conversion_matrix(wset: WeightedSet, k: int) -> np.ndarray:
    """Matrix ``C`` with ``adapted_basis = canonical_basis @ C``."""
    n = dimension(wset.model, k)
    if wset.model.kind is Kind.SPHERE2:
        return np.eye(n)
    kind = wset.support.kind
    if kind is SupportKind.INTERVAL:
        C = np.zeros((n, n), dtype=complex)
        for j in range(n):
            e = np.zeros(j + 1)
            e[j] = 1.0
            C[: j + 1, j] = np.polynomial.chebyshev.cheb2poly(e)
        return C
    if kind in (SupportKind.CIRCLE, SupportKind.DISK):
        return np.diag(wset.support.radius ** -np.arange(n, dtype=float)).astype(complex)
    return np.eye(n, dtype=complex)
