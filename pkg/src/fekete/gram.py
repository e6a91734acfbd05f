"""Gram matrices of degree-k sections under a weighted measure.

The Gram matrix is never formed for the numerics: the weighted evaluation
matrix ``sqrt(m_i) e^{-k phi(x_i)} b_j(x_i)`` in a set-adapted basis ``b`` is
QR-factored, so ``G_b = R^H R``. Canonical-basis quantities follow from the
exact triangular change of basis (see ``model_spaces.adapted_basis``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import SingularError
from .measures import DiscreteMeasure
from .model_spaces import (
    Weight,
    WeightedSet,
    adapted_basis,
    basis_matrix,
    conversion_matrix,
    dimension,
    reference_pair,
)

SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class GramSystem:
    wset: WeightedSet
    measure: DiscreteMeasure
    k: int
    weight: Weight
    R: Optional[np.ndarray]  # upper triangular, positive diagonal; None if singular
    phi_shift: float  # G_b = exp(-2 k phi_shift) R^H R
    logdet_c: float
    logdet: float  # canonical basis; -inf when singular
    singular: bool

    @property
    def N(self) -> int:
        return dimension(self.wset.model, self.k)

    @property
    def gram(self) -> np.ndarray:
        """Canonical Gram ``G_ij = int s_i conj(s_j) e^{-2k phi} dmu``."""
        A = basis_matrix(self.wset.model, self.k, self.measure.atoms)
        w = self.measure.masses * np.exp(-2.0 * self.k * self.weight(self.measure.atoms))
        return (A.T * w) @ A.conj()

    @property
    def chol(self) -> np.ndarray:
        """Lower Cholesky factor of the canonical Gram matrix."""
        if self.singular:
            raise SingularError("Gram matrix is singular")
        return np.linalg.cholesky(self.gram)

    def require_nonsingular(self) -> None:
        if self.singular:
            raise SingularError(f"degree-{self.k} Gram matrix is singular for this measure")

    def sections(self, points) -> np.ndarray:
        """Orthonormal sections evaluated at points (unweighted); shape (n, N)."""
        self.require_nonsingular()
        B, _ = adapted_basis(self.wset, self.k, points)
        V = linalg.solve_triangular(self.R, B.T, trans="T", lower=False).T
        return V * math.exp(self.k * self.phi_shift)

    def coefficients(self) -> np.ndarray:
        """Rows: canonical-basis coefficients of the orthonormal sections."""
        self.require_nonsingular()
        C = conversion_matrix(self.wset, self.k)
        T = C @ linalg.solve_triangular(self.R, np.eye(self.N), lower=False)
        return (T * math.exp(self.k * self.phi_shift)).T


def gram_system(
    wset: WeightedSet,
    mu: DiscreteMeasure,
    k: int,
    weight: Optional[Weight] = None,
    check_support: bool = True,
) -> GramSystem:
    """Assemble the degree-``k`` system of ``mu`` under weight ``k*phi``.

    Rank-deficient inputs (for example ``delta_P`` with repeated points) give
    a system flagged singular with ``logdet = -inf`` instead of an error.
    """
    if check_support:
        wset.check_support(mu.atoms)
    weight = wset.weight if weight is None else weight
    n = dimension(wset.model, k)
    phi = weight(mu.atoms)
    shift = float(phi.min())
    B, ldc = adapted_basis(wset, k, mu.atoms)
    A = B * (np.sqrt(mu.masses) * np.exp(-k * (phi - shift)))[:, None]
    R = None
    singular = A.shape[0] < n
    if not singular:
        R = np.linalg.qr(A, mode="r")[:n]
        d = np.diag(R)
        mag = np.abs(d)
        singular = bool(mag.min() <= SINGULAR_RTOL * mag.max())
        if not singular:
            phase = np.where(mag > 0, d / mag, 1.0)
            R = R / phase[:, None]
    if singular:
        return GramSystem(wset, mu, k, weight, None, shift, ldc, -math.inf, True)
    logdet_b = 2.0 * float(np.sum(np.log(np.abs(np.diag(R))))) - 2.0 * k * n * shift
    return GramSystem(wset, mu, k, weight, R, shift, ldc, logdet_b - 2.0 * ldc, False)


def orthonormal_sections(gs: GramSystem) -> np.ndarray:
    return gs.coefficients()


def reference_logdet(wset: WeightedSet, k: int) -> float:
    ref_set, mu0 = reference_pair(wset.model, max(k, 1))
    return gram_system(ref_set, mu0, k).logdet


def l_functional(wset: WeightedSet, mu: DiscreteMeasure, k: int, ref=None, weight=None) -> float:
    """Normalized log-volume of the L2 unit ball, relative to the reference ball.

    ``ref`` is ``(ref_set, ref_measure)``; defaults to the model's reference pair.
    """
    if k < 1:
        raise ValueError("l_functional needs k >= 1")
    gs = gram_system(wset, mu, k, weight)
    gs.require_nonsingular()
    if ref is None:
        ref = reference_pair(wset.model, k)
    gs0 = gram_system(ref[0], ref[1], k)
    gs0.require_nonsingular()
    return -(gs.logdet - gs0.logdet) / (2.0 * k * gs.N)


def volume_ratio_log(gs_a: GramSystem, gs_b: GramSystem) -> float:
    """``log(vol B2(A) / vol B2(B))``."""
    if gs_a.k != gs_b.k or gs_a.wset.model != gs_b.wset.model:
        raise ValueError("volume ratio needs systems of the same model and degree")
    gs_a.require_nonsingular()
    gs_b.require_nonsingular()
    return gs_b.logdet - gs_a.logdet


def det_section_l2_identity_check(
    wset: WeightedSet, mu: DiscreteMeasure, k: int, perturb: float = 0.0, max_terms: int = 10**5
):
    """Brute-force squared L2 norm of ``det S`` against ``N! det G``.

    ``perturb`` adds ``perturb * I`` to the Gram matrix on the right-hand side
    (fault injection for the self-test).
    """
    n = dimension(wset.model, k)
    m = len(mu)
    if m**n > max_terms:
        raise ValueError(f"enumeration of {m}^{n} tuples is too large")
    A = basis_matrix(wset.model, k, mu.atoms)
    w = np.exp(-2.0 * k * wset.weight(mu.atoms))
    lhs = 0.0
    for tup in itertools.product(range(m), repeat=n):
        idx = list(tup)
        if len(set(idx)) < n:
            continue
        det = np.linalg.det(A[idx].T)
        lhs += abs(det) ** 2 * float(np.prod(w[idx] * mu.masses[idx]))
    G = gram_system(wset, mu, k).gram
    G = G + perturb * np.eye(n)
    rhs = math.factorial(n) * float(np.real(np.linalg.det(G)))
    return lhs, rhs
