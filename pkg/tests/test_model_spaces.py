import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import sph_harm_y

from fekete import COMPLEX_LINE, SPHERE2, DomainError, Weight, circle, dimension, disk, interval, sphere
from fekete.model_spaces import (
    adapted_basis,
    basis_eval,
    basis_matrix,
    chebyshev_gauss,
    conversion_matrix,
    default_grid,
    real_harmonics,
    reference_pair,
    sphere_product_grid,
)


def test_dimension_examples():
    assert dimension(COMPLEX_LINE, 0) == 1
    assert dimension(COMPLEX_LINE, 5) == 6
    assert dimension(SPHERE2, 3) == 16


def test_sphere_dimension_matches_rank():
    rng = np.random.default_rng(0)
    xyz = rng.normal(size=(60, 3))
    xyz /= np.linalg.norm(xyz, axis=1)[:, None]
    assert np.linalg.matrix_rank(basis_matrix(SPHERE2, 3, xyz)) == 16


@given(st.integers(0, 30))
def test_dimension_formulas(k):
    assert dimension(COMPLEX_LINE, k) == k + 1
    assert dimension(SPHERE2, k) == (k + 1) ** 2


def test_basis_eval_monomials():
    np.testing.assert_allclose(basis_eval(COMPLEX_LINE, 1, 1.0), [1, 1])
    np.testing.assert_allclose(basis_eval(COMPLEX_LINE, 2, 2j), [1, 2j, -4])


def test_sphere_constant_harmonic_is_one():
    # orthonormal for the uniform probability measure: Y00 = 1
    v = basis_eval(SPHERE2, 0, [0.0, 0.6, 0.8])
    np.testing.assert_allclose(v, [1.0])


def test_sphere_rejects_non_unit_point():
    with pytest.raises(DomainError):
        basis_eval(SPHERE2, 1, [1.0, 1.0, 0.0])


def test_real_harmonics_match_scipy():
    # area-normalized harmonics; the sphere basis rescales them by sqrt(4 pi)
    rng = np.random.default_rng(1)
    xyz = rng.normal(size=(5, 3))
    xyz /= np.linalg.norm(xyz, axis=1)[:, None]
    theta = np.arccos(xyz[:, 2])
    az = np.arctan2(xyz[:, 1], xyz[:, 0])
    Y = real_harmonics(3, xyz)
    col = 0
    for l in range(4):
        for m in range(-l, l + 1):
            c = sph_harm_y(l, abs(m), theta, az)
            # real form without the Condon-Shortley phase
            if m > 0:
                ref = math.sqrt(2) * (-1) ** m * c.real
            elif m < 0:
                ref = math.sqrt(2) * (-1) ** m * c.imag
            else:
                ref = c.real
            np.testing.assert_allclose(Y[:, col], ref, atol=1e-12)
            col += 1


def test_default_grid_interval():
    g = default_grid(interval(), 1, 2)
    c1, c3 = math.cos(math.pi / 8), math.cos(3 * math.pi / 8)
    np.testing.assert_allclose(g.real, [-c1, -c3, c3, c1], atol=1e-15)


def test_default_grid_circle():
    g = default_grid(circle(), 1, 2)
    assert g.size == 6
    np.testing.assert_allclose(g[0], 1.0)
    np.testing.assert_allclose(np.abs(g), 1.0, atol=1e-15)


def test_default_grid_sphere():
    g = default_grid(sphere(), 2, 2)
    assert g.shape[0] >= 18
    np.testing.assert_allclose(np.linalg.norm(g, axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("ws", [interval(), circle(), circle(2.5), disk(1.5)])
@pytest.mark.parametrize("k", [1, 5, 17])
def test_candidates_in_support(ws, k):
    g = ws.candidates(k)
    assert g.size >= k + 1
    assert np.all(ws.support.contains(g))


def test_reference_pair_line():
    ws, mu = reference_pair(COMPLEX_LINE, 8)
    assert ws.support.radius == 1.0 and ws.weight.is_zero
    np.testing.assert_allclose(mu.masses, mu.masses[0])


def test_reference_pair_sphere_mass():
    _, mu = reference_pair(SPHERE2, 6)
    assert abs(mu.masses.sum() - 1.0) <= 1e-14


@pytest.mark.parametrize("k", [1, 7, 20])
def test_circle_quadrature_exactness(k):
    pts = np.exp(2j * np.pi * np.arange(2 * k + 1) / (2 * k + 1))
    A = basis_matrix(COMPLEX_LINE, k, pts)
    G = A.T @ A.conj() / pts.size
    np.testing.assert_allclose(G, np.eye(k + 1), atol=1e-12)


@pytest.mark.parametrize("k", [2, 6, 12])
def test_sphere_orthonormality(k):
    xyz, w = sphere_product_grid(k + 1, 2 * k + 2)
    Y = basis_matrix(SPHERE2, k, xyz)
    G = (Y.T * w) @ Y
    np.testing.assert_allclose(G, np.eye((k + 1) ** 2), atol=1e-8)


@given(st.floats(-1, 1), st.floats(-1, 1), st.integers(0, 8))
def test_basis_eval_pure(x, y, k):
    z = complex(x, y)
    a = basis_eval(COMPLEX_LINE, k, z)
    b = basis_eval(COMPLEX_LINE, k, z)
    assert a.size == k + 1 and np.all(np.isfinite(a))
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("ws", [interval(), circle(2.0), disk(0.5)])
def test_adapted_basis_conversion(ws):
    k = 9
    pts = ws.candidates(k)
    B, ldc = adapted_basis(ws, k, pts)
    C = conversion_matrix(ws, k)
    np.testing.assert_allclose(B, basis_matrix(ws.model, k, pts) @ C, atol=1e-9)
    assert abs(ldc - math.log(abs(np.linalg.det(C)))) <= 1e-9


def test_weight_kinds():
    pts = np.array([0.5, -1.0], dtype=complex)
    np.testing.assert_allclose(Weight.quadratic(0.25)(pts), [0.0625, 0.25])
    np.testing.assert_allclose(Weight.log_abs_shift(2.0)(pts), np.log([1.5, 3.0]))
    np.testing.assert_allclose(Weight.zero().shifted(0.3)(pts), 0.3)
    tab = Weight.tabulated([-1, 1], [0.0, 2.0])
    np.testing.assert_allclose(tab(pts), [1.5, 0.0])


def test_weighted_sphere_rejected():
    from fekete.model_spaces import Support, SupportKind, WeightedSet

    with pytest.raises(DomainError):
        WeightedSet(SPHERE2, Support(SupportKind.SPHERE), Weight.quadratic(1.0))


def test_grid_outside_support_rejected():
    with pytest.raises(DomainError):
        interval(grid=[0.0, 1.5])


def test_chebyshev_gauss_ascending():
    g = chebyshev_gauss(7)
    assert np.all(np.diff(g) > 0)
