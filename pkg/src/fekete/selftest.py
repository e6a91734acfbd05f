"""Brute-force identity checks run by ``fekete selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bergman import bergman_measure, rho_values
from .configurations import recursively_extremal
from .gram import det_section_l2_identity_check, gram_system, l_functional
from .measures import Configuration, DiscreteMeasure
from .model_spaces import Weight, chebyshev_gauss, circle, disk, equispaced_circle, interval

FD_STEP = 1e-5


@dataclass
class CheckRow:
    suite: str
    case: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tol)


def _lemma_det(fault: bool):
    perturb = 1e-3 if fault else 0.0
    cases = [
        ("circle r=1, 5 atoms, k=1", circle(), DiscreteMeasure.uniform(equispaced_circle(5)), 1),
        ("interval, 4 Chebyshev atoms, k=1", interval(), DiscreteMeasure.uniform(chebyshev_gauss(4)), 1),
        (
            "interval quad(0.3), 5 atoms, k=2",
            interval(Weight.quadratic(0.3)),
            DiscreteMeasure.normalized([-1.0, -0.4, 0.1, 0.7, 1.0], [1, 2, 3, 2, 1]),
            2,
        ),
        ("circle r=2, 6 atoms, k=2", circle(2.0), DiscreteMeasure.uniform(equispaced_circle(6, 2.0)), 2),
    ]
    for name, ws, mu, k in cases:
        lhs, rhs = det_section_l2_identity_check(ws, mu, k, perturb=perturb)
        yield CheckRow("lemma-det", name, abs(lhs / rhs - 1.0), 1e-12)


def _balanced():
    cases = [
        ("interval k=2 {-1,0,1}", interval(), [-1.0, 0.0, 1.0], 2),
        ("interval k=3 random", interval(), [-0.9, -0.2, 0.35, 0.8], 3),
        ("circle k=4 equispaced", circle(), equispaced_circle(5), 4),
        ("circle r=2 k=2 skewed", circle(2.0), 2.0 * np.exp(1j * np.array([0.1, 1.9, 4.0])), 2),
        ("disk k=2 interior", disk(1.0), [0.1 + 0.2j, -0.5j, 0.6], 2),
        ("interval quad(0.5) k=4", interval(Weight.quadratic(0.5)), np.linspace(-1, 1, 5), 4),
    ]
    for name, ws, pts, k in cases:
        mu = Configuration(np.asarray(pts, dtype=complex)).as_measure()
        beta = bergman_measure(gram_system(ws, mu, k))
        yield CheckRow("balanced", name, float(np.max(np.abs(beta.masses - mu.masses))), 1e-8)


def _derivatives(rng):
    ws = interval(Weight.quadratic(0.2))
    k = 3
    mu = DiscreteMeasure.uniform(chebyshev_gauss(12).astype(complex))
    for i in range(3):
        nu = DiscreteMeasure.normalized(rng.uniform(-1, 1, 8).astype(complex), rng.uniform(0.1, 1.0, 8))

        def f(t):
            return gram_system(ws, mu.mix(nu, t), k).logdet

        t0 = 0.5
        fd = (f(t0 + FD_STEP) - f(t0 - FD_STEP)) / (2 * FD_STEP)
        gs = gram_system(ws, mu.mix(nu, t0), k)
        exact = float(np.dot(nu.masses, rho_values(gs, nu.atoms)) - np.dot(mu.masses, rho_values(gs, mu.atoms)))
        yield CheckRow("derivative-mu", f"direction {i}", abs(fd - exact) / max(abs(exact), 1e-300), 1e-4)
    for i in range(3):
        c = rng.normal(size=3)

        def v(z, c=c):
            x = np.real(np.asarray(z))
            return c[0] + c[1] * x + c[2] * x**2

        def g(t, v=v):
            w = Weight.custom(lambda z: ws.weight(z) + t * v(z))
            return gram_system(ws, mu, k, weight=w).logdet

        fd = (g(FD_STEP) - g(-FD_STEP)) / (2 * FD_STEP)
        gs = gram_system(ws, mu, k)
        beta = bergman_measure(gs)
        exact = -2.0 * k * gs.N * float(np.dot(beta.masses, v(beta.atoms)))
        yield CheckRow("derivative-phi", f"direction {i}", abs(fd - exact) / max(abs(exact), 1e-300), 1e-4)


def _shift_covariance():
    ws = interval(Weight.quadratic(0.4))
    mu = DiscreteMeasure.uniform(chebyshev_gauss(40).astype(complex))
    for k in (2, 5):
        base = l_functional(ws, mu, k)
        moved = l_functional(ws.with_weight(ws.weight.shifted(0.7)), mu, k)
        yield CheckRow("shift-covariance", f"k={k}, c=0.7", abs(moved - base - 0.7), 1e-10)


def _recursive(k_values=(3, 6)):
    for k in k_values:
        ws = interval()
        x, w = np.polynomial.legendre.leggauss(4 * (k + 1))
        mu = DiscreteMeasure(x.astype(complex), w / 2)
        tr = recursively_extremal(ws, mu, k)
        n = tr.N
        steps = np.arange(1, n + 1)
        yield CheckRow("recursive", f"k={k} rho_j >= j", float(max(0.0, np.max(steps - tr.rho_values))), 1e-9)
        shortfall = math.lgamma(n + 1) - 2.0 * tr.log_abs_det_weighted
        yield CheckRow("recursive", f"k={k} |det|^2 >= N!", max(0.0, shortfall), 1e-9)
        yield CheckRow("recursive", f"k={k} triangular", float(np.max(np.abs(np.triu(tr.eval_matrix, 1)))), 1e-10)
        gs = gram_system(ws, mu, k)
        trace = float(np.dot(mu.masses, rho_values(gs, mu.atoms)))
        yield CheckRow("trace", f"interval k={k}", abs(trace - n), 1e-8)


def run_selftest(inject_fault: bool = False, seed: int = 7) -> list:
    rng = np.random.default_rng(seed)
    rows = []
    rows.extend(_lemma_det(inject_fault))
    rows.extend(_balanced())
    rows.extend(_derivatives(rng))
    rows.extend(_shift_covariance())
    rows.extend(_recursive())
    return rows


def format_table(rows) -> str:
    lines = [f"{'suite':<18} {'case':<36} {'error':>12} {'tol':>8}  status"]
    for r in rows:
        lines.append(f"{r.suite:<18} {r.case:<36} {r.error:>12.3e} {r.tol:>8.0e}  {'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines)
