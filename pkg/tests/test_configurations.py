import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fekete import (
    Configuration,
    DiscreteMeasure,
    Weight,
    asymptotic_fekete_check,
    circle,
    fekete_search,
    interval,
    k_diameter,
    leja_result,
    leja_sequence,
    recursively_extremal,
    sphere,
    weighted_vandermonde,
)
from fekete.configurations import FeketeResult, Method, exchange_certificate
from fekete.errors import DomainError
from fekete.experiments import uniform_measure
from fekete.model_spaces import chebyshev_lobatto, equispaced_circle


def legendre_uniform(n=200):
    x, w = np.polynomial.legendre.leggauss(n)
    return DiscreteMeasure(x.astype(complex), w / 2)


def test_vandermonde_examples():
    assert abs(weighted_vandermonde(circle(), 1, [1, -1]) - math.log(2)) <= 1e-14
    assert abs(weighted_vandermonde(interval(), 2, [-1, 0, 1]) - math.log(2)) <= 1e-14
    assert weighted_vandermonde(interval(), 2, [-1, 0, 0]) == -math.inf


def test_vandermonde_wrong_size():
    with pytest.raises(ValueError):
        weighted_vandermonde(interval(), 2, [0.0, 1.0])


def test_vandermonde_weighted():
    ws = interval(Weight.quadratic(0.5))
    pts = np.array([-0.5, 0.25, 0.75])
    plain = weighted_vandermonde(interval(), 2, pts)
    expected = plain - 2 * np.sum(0.5 * pts**2)
    assert abs(weighted_vandermonde(ws, 2, pts) - expected) <= 1e-12


@given(st.permutations(list(range(6))))
@settings(max_examples=25)
def test_vandermonde_permutation(perm):
    pts = np.array([-0.9, -0.4, 0.05, 0.3, 0.6, 0.99])
    a = weighted_vandermonde(interval(), 5, pts)
    b = weighted_vandermonde(interval(), 5, pts[list(perm)])
    assert abs(a - b) <= 1e-12


def test_vandermonde_basis_independence():
    pts = np.exp(1j * np.array([0.1, 1.3, 2.2, 3.9, 5.0]))
    rng = np.random.default_rng(2)
    U, _ = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    a = weighted_vandermonde(circle(), 4, pts)
    b = weighted_vandermonde(circle(), 4, pts, basis=U)
    assert abs(a - b) <= 1e-9


@pytest.mark.parametrize("k", [1, 2, 5, 10, 20])
def test_circle_fekete_exact(k):
    n = k + 1
    res = fekete_search(circle(), k)
    assert abs(res.log_abs_det_weighted - 0.5 * n * math.log(n)) <= 1e-6
    assert res.converged


def test_interval_fekete_k2_brute_force():
    ws = interval()
    res = fekete_search(ws, 2)
    grid = res.grid
    best = max(
        itertools.combinations(range(grid.size), 3),
        key=lambda t: weighted_vandermonde(ws, 2, grid[list(t)]),
    )
    np.testing.assert_allclose(np.sort(res.config.points.real), [-1, 0, 1], atol=1e-15)
    np.testing.assert_allclose(np.sort(grid[list(best)].real), [-1, 0, 1], atol=1e-15)


def test_interval_fekete_k3():
    ws = interval(grid=chebyshev_lobatto(4001))
    res = fekete_search(ws, 3)
    x = np.sort(res.config.points.real)
    s = 1 / math.sqrt(5)
    np.testing.assert_allclose(x, [-1, -s, s, 1], atol=1e-3)


@pytest.mark.parametrize("ws", [interval(), interval(Weight.quadratic(0.4)), circle(1.5)])
def test_exchange_certificate(ws):
    res = fekete_search(ws, 8)
    assert res.converged
    assert exchange_certificate(ws, res) <= 1e-12
    assert np.all(np.diff(res.logdet_trace) >= -1e-9)


def test_fekete_shift_argmax_invariance():
    ws = interval(Weight.quadratic(0.6))
    a = fekete_search(ws, 9)
    b = fekete_search(ws.with_weight(ws.weight.shifted(1.7)), 9)
    np.testing.assert_array_equal(a.indices, b.indices)
    assert abs(a.log_abs_det_weighted - b.log_abs_det_weighted - 1.7 * 9 * 10) <= 1e-9


def test_fekete_grid_too_small():
    with pytest.raises(DomainError):
        fekete_search(interval(grid=[-1.0, 1.0]), 3)


def test_greedy_only():
    res = fekete_search(interval(), 6, exchange=False)
    assert res.method is Method.GREEDY_ONLY and res.iterations == 0
    full = fekete_search(interval(), 6)
    assert full.log_abs_det_weighted >= res.log_abs_det_weighted - 1e-12


def test_leja_circle_starts_at_one():
    cfg = leja_sequence(circle(), 5)
    assert cfg.points[0] == pytest.approx(1.0)


def test_leja_interval_suboptimality():
    ws = interval()
    res = leja_result(ws, 2)
    grid = res.grid
    best = max(weighted_vandermonde(ws, 2, grid[list(t)]) for t in itertools.combinations(range(grid.size), 3))
    assert res.log_abs_det_weighted >= best - math.log(3)


def test_leja_nested():
    ws = interval(grid=np.linspace(-1, 1, 301))
    longer = leja_sequence(ws, 9).points
    for k in (3, 6):
        np.testing.assert_array_equal(leja_sequence(ws, k).points, longer[: k + 1])


def test_recursive_k1_example():
    tr = recursively_extremal(interval(), legendre_uniform(), 1)
    np.testing.assert_allclose(tr.points.real, [1, -1], atol=1e-15)
    np.testing.assert_allclose(tr.rho_values, [3, 4], atol=1e-10)
    np.testing.assert_allclose(tr.eval_matrix, [[math.sqrt(3), 0], [-1, 2]], atol=1e-10)
    assert abs(2 * tr.log_abs_det_weighted - math.log(12)) <= 1e-10


@pytest.mark.parametrize(
    "ws,mu,k",
    [
        (interval(), legendre_uniform(), 8),
        (interval(Weight.quadratic(0.3)), legendre_uniform(), 10),
        (circle(), DiscreteMeasure.uniform(equispaced_circle(64)), 7),
        (circle(2.0), DiscreteMeasure.uniform(equispaced_circle(40, 2.0)), 5),
    ],
)
def test_recursive_invariants(ws, mu, k):
    tr = recursively_extremal(ws, mu, k)
    n = tr.N
    assert np.all(tr.rho_values >= np.arange(1, n + 1) - 1e-9)
    assert np.max(np.abs(np.triu(tr.eval_matrix, 1))) <= 1e-10
    assert 2 * tr.log_abs_det_weighted >= math.lgamma(n + 1) - 1e-9


def test_recursive_deterministic_on_circle():
    mu = DiscreteMeasure.uniform(equispaced_circle(64))
    a = recursively_extremal(circle(), mu, 6)
    b = recursively_extremal(circle(), mu, 6)
    np.testing.assert_array_equal(a.indices, b.indices)


def test_recursive_sphere():
    k = 3
    mu = uniform_measure(sphere(), k)
    ws = sphere(grid=mu.atoms)
    tr = recursively_extremal(ws, mu, k)
    assert np.all(tr.rho_values >= np.arange(1, tr.N + 1) - 1e-9)


def test_k_diameter_circle():
    assert abs(k_diameter(circle(), 1, fekete_search(circle(), 1)) + 0.5 * math.log(2)) <= 1e-9


def test_k_diameter_recursive_uses_reference_basis():
    mu = legendre_uniform()
    tr = recursively_extremal(interval(), mu, 6)
    direct = weighted_vandermonde(interval(), 6, tr.config)
    assert abs(k_diameter(interval(), 6, tr) + direct / (6 * 7)) <= 1e-10


def test_k_diameter_degenerate():
    res = FeketeResult(Configuration([0.0, 0.0]), -math.inf, Method.GREEDY_ONLY, 0, True, 1)
    with pytest.raises(ArithmeticError):
        k_diameter(interval(), 1, res)


def test_asymptotic_fekete_circle():
    results = [fekete_search(circle(), k) for k in (2, 4, 8, 16)]
    chk = asymptotic_fekete_check(results)
    for k, v in zip(chk.degrees, chk.values):
        assert abs(v - 0.5 * math.log(k + 1) / k) <= 1e-9
    assert chk.passes


def test_asymptotic_fekete_degenerate_fails():
    bad = [FeketeResult(Configuration(np.zeros(k + 1)), -math.inf, Method.GREEDY_ONLY, 0, True, k) for k in (1, 2, 3)]
    chk = asymptotic_fekete_check(bad)
    assert chk.liminf_estimate == -math.inf and not chk.passes


def test_asymptotic_fekete_recursive_nonnegative():
    results = [recursively_extremal(interval(), legendre_uniform(), k) for k in (4, 8, 12)]
    assert all(v >= 0 for v in asymptotic_fekete_check(results).values)
