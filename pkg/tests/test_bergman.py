import math

import numpy as np
import pytest

from fekete import (
    Configuration,
    DiscreteMeasure,
    SingularError,
    Weight,
    bergman_field,
    bergman_measure,
    bm_growth_diagnostic,
    circle,
    disk,
    extremal_weight_estimate,
    gram_system,
    interval,
    ks_distance,
    recursively_extremal,
    rho_at,
    rho_values,
)
from fekete.bergman import growth_fit
from fekete.measures import ReferenceLaw
from fekete.model_spaces import chebyshev_gauss, equispaced_circle


def legendre_uniform(n=400):
    x, w = np.polynomial.legendre.leggauss(n)
    return DiscreteMeasure(x.astype(complex), w / 2)


def circle_uniform(n=128, r=1.0):
    return DiscreteMeasure.uniform(equispaced_circle(n, r))


@pytest.mark.parametrize("k", [0, 3, 12])
def test_circle_rho_constant(k):
    gs = gram_system(circle(), circle_uniform(), k)
    pts = np.exp(1j * np.linspace(0, 6, 37))
    np.testing.assert_allclose(rho_values(gs, pts), k + 1, rtol=1e-12)


def test_interval_rho_endpoint():
    gs = gram_system(interval(), legendre_uniform(), 2)
    assert abs(rho_at(gs, 1.0) - 9) <= 1e-3


@pytest.mark.parametrize("seed", range(5))
def test_trace_identity(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 12))
    mu = DiscreteMeasure.normalized(rng.uniform(-1, 1, 60).astype(complex), rng.uniform(0, 1, 60))
    gs = gram_system(interval(Weight.quadratic(0.3)), mu, k)
    rho = rho_values(gs, mu.atoms)
    assert np.all(rho >= 0)
    assert abs(np.dot(mu.masses, rho) - gs.N) <= 1e-8


def test_rho_shift_invariant():
    mu = legendre_uniform()
    ws = interval(Weight.quadratic(0.7))
    pts = np.linspace(-1, 1, 21)
    a = rho_values(gram_system(ws, mu, 6), pts)
    b = rho_values(gram_system(ws.with_weight(ws.weight.shifted(-2.5)), mu, 6), pts)
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_rho_positive_on_grid():
    gs = gram_system(interval(), legendre_uniform(), 10)
    assert np.all(rho_values(gs, interval().candidates(10)) > 0)


def test_singular_rho():
    gs = gram_system(interval(), Configuration([0.0]).as_measure(), 1)
    with pytest.raises(SingularError):
        rho_values(gs, [0.0])


def test_bergman_circle_is_uniform():
    mu = circle_uniform(64)
    beta = bergman_measure(gram_system(circle(), mu, 9))
    np.testing.assert_allclose(beta.masses, mu.masses, atol=1e-12)


@pytest.mark.parametrize(
    "ws,pts,k",
    [
        (interval(), [-0.9, -0.1, 0.4, 0.95], 3),
        (circle(1.5), 1.5 * np.exp(1j * np.array([0.0, 1.0, 2.5, 4.0, 5.5])), 4),
        (interval(Weight.quadratic(1.0)), np.linspace(-1, 1, 7), 6),
        (disk(1.0), [0.1, 0.5j, -0.7 + 0.2j], 2),
        (circle(1.0, Weight.log_abs_shift(3.0)), np.exp(1j * np.array([0.2, 2.0])), 1),
    ],
)
def test_balanced(ws, pts, k):
    mu = Configuration(np.asarray(pts, dtype=complex)).as_measure()
    beta = bergman_measure(gram_system(ws, mu, k))
    np.testing.assert_allclose(beta.masses, 1 / len(pts), atol=1e-8)


def test_bergman_closer_to_arcsine():
    mu = legendre_uniform()
    beta = bergman_measure(gram_system(interval(), mu, 40))
    law = ReferenceLaw.arcsine()
    assert ks_distance(beta, law) < ks_distance(mu, law)


def test_bm_circle():
    d = bm_growth_diagnostic(circle(), circle_uniform(256), [2, 5, 10, 20])
    np.testing.assert_allclose(d.sup_rho, [3, 6, 11, 21], rtol=1e-12)
    assert abs(d.exp_rate) <= 1e-12 and d.bm_flag


def test_bm_interval_uniform():
    d = bm_growth_diagnostic(interval(), legendre_uniform(), [4, 8, 16])
    np.testing.assert_allclose(d.sup_rho, [25, 81, 289], rtol=1e-2)
    assert abs(d.poly_exponent - 2) <= 0.05


def test_bm_arcsine():
    mu = DiscreteMeasure.uniform(chebyshev_gauss(600))
    d = bm_growth_diagnostic(interval(), mu, [5, 10, 20, 40])
    assert d.exp_rate <= 0.01 and d.bm_flag


def test_bm_needs_three_degrees():
    with pytest.raises(ValueError):
        bm_growth_diagnostic(circle(), circle_uniform(), [2, 4])


def test_growth_fit_exact_power():
    ks = np.array([4, 8, 16, 32])
    poly, rate = growth_fit(ks, ks + 1, (ks + 1.0) ** 3)
    assert abs(poly - 3) <= 1e-10 and abs(rate) <= 1e-10
    poly, rate = growth_fit(ks, ks + 1, np.exp(0.5 * ks))
    assert rate > 0.4


def test_bm_diagnostic_json_keys():
    d = bm_growth_diagnostic(circle(), circle_uniform(), [1, 2, 3])
    assert set(d.to_json()) == {"degrees", "sup_rho", "poly_exponent", "exp_rate", "bm_flag"}


def test_extremal_weight_circle():
    vals = []
    for k in (5, 20, 80):
        gs = gram_system(circle(), circle_uniform(256), k)
        v = extremal_weight_estimate(gs, 1.0)
        assert abs(v - math.log(k + 1) / (2 * k)) <= 1e-12
        vals.append(v)
    assert vals[0] > vals[1] > vals[2]


def test_extremal_weight_outside_disk():
    gs = gram_system(circle(), circle_uniform(256), 40)
    assert abs(extremal_weight_estimate(gs, 2.0) - math.log(2)) <= 0.05


def test_extremal_weight_interval_interior():
    gs = gram_system(interval(), legendre_uniform(), 40)
    assert -0.1 <= extremal_weight_estimate(gs, 0.3) <= 0.1


def test_field():
    gs = gram_system(interval(), legendre_uniform(), 4)
    bf = bergman_field(gs, interval().candidates(4))
    assert bf.sup_rho == bf.rho_values.max()
    assert abs(bf.sup_rho - 25) <= 0.25


def test_recursive_fields_below_full_rho():
    mu = legendre_uniform(60)
    tr = recursively_extremal(interval(), mu, 6)
    gs = gram_system(interval(), mu, 6)
    full = rho_values(gs, tr.points[::-1])
    assert np.all(tr.rho_values <= full * (1 + 1e-12))
