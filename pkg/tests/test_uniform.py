import math

import numpy as np
import pytest

from teaming import GameError, GameParams, RegimeError, SparsityPattern, WeightMatrix, objective, optimize_weights
from teaming.uniform import (
    Boundary,
    F,
    F_prime,
    beta_sweep,
    beta_threshold,
    coefficient_table,
    d_star,
    dw_dbeta,
    f_tilde,
    interior_onset,
    mu_nash,
    solve_uniform,
    solve_uniform_newton,
)

P5 = GameParams(5, 3, 1.0, 5.0)
P20 = GameParams(20, 11, 1.0, 5.0)


def test_f_tilde_at_zero():
    assert f_tilde(0.0, P5) == pytest.approx(32.0)
    assert f_tilde(0.0, P20) == pytest.approx(2.0**20)


def test_f_tilde_matches_enumeration_small_n(rng):
    for n in range(2, 11):
        p = GameParams(n, n / 2 + rng.uniform(0.1, n / 2), rng.uniform(0.2, 3), 2.0)
        for w in rng.uniform(0, 1, size=4):
            assert f_tilde(w, p) == pytest.approx(objective(WeightMatrix.uniform(n, w), p).total, rel=1e-10)


def test_f_tilde_n20_frozen_enumeration_value():
    # 2**20-profile enumeration of the general objective at w=0.2 gave 222.44344041022646
    assert f_tilde(0.2, P20) == pytest.approx(222.44344041022646, rel=1e-12)


def test_wrong_regime_rejected():
    with pytest.raises(RegimeError):
        f_tilde(0.5, GameParams(5, 2, 1, 1))
    with pytest.raises(GameError):
        f_tilde(1.5, P5)


def test_F_matches_finite_differences(rng):
    h = 1e-7
    for p in (P5, P20, GameParams(8, 5.5, 0.3, 1.0)):
        for w in rng.uniform(0.01, 0.99, size=10):
            fd = (f_tilde(w + h, p) - f_tilde(w - h, p)) / (2 * h)
            assert abs(F(w, p) - fd) <= 1e-6 * (1 + abs(F(w, p)))


def test_F_prime_matches_finite_differences():
    h = 1e-6
    for w in (0.1, 0.5, 0.9):
        fd = (F(w + h, P5) - F(w - h, P5)) / (2 * h)
        assert F_prime(w, P5) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("p", [P5, P20, GameParams(11, 6, 0.05, 10.0)])
def test_F_strictly_increasing(p):
    vals = [F(w, p) for w in np.linspace(0, 1, 100)]
    assert all(b > a for a, b in zip(vals[:-1], vals[1:]))


def test_beta_threshold_values():
    assert beta_threshold(P5) == pytest.approx(25 / 56, rel=1e-14)
    assert beta_threshold(P5) == pytest.approx(0.44643, abs=5e-6)
    assert beta_threshold(GameParams(20, 11, 1, 1)) == pytest.approx(2.0**-18 * 20 / 24, rel=1e-14)


@pytest.mark.parametrize("n,theta,rho", [(5, 3, 5), (10, 6, 1), (20, 11, 10), (7, 6.5, 2)])
def test_F_vanishes_at_threshold(n, theta, rho):
    p = GameParams(n, theta, 1.0, rho)
    p = p.replace(beta=beta_threshold(p))
    assert abs(F(0.0, p)) <= 1e-10


def test_d_star_examples():
    assert d_star(P20) == 11
    assert d_star(P5) == 3


def test_d_star_relation_to_exponent_parabola(rng):
    """d_star is the rounded-up vertex of A_d; the true large-beta term is d=1 or d=N."""
    for _ in range(100):
        n = int(rng.integers(2, 40))
        p = GameParams(n, rng.uniform(n / 2 + 1e-3, n), 1.0, 1.0)
        a = coefficient_table(p).a_coeffs
        vertex = p.theta * (n - 1) / n + 0.5
        assert d_star(p) == min(n, math.ceil(vertex))
        # A_d decreases then increases; its discrete minimiser is within one step of d_star
        assert abs(int(np.argmin(a)) - d_star(p)) <= 1
        assert 1 + int(np.argmax(a[1:])) in (1, n)


@pytest.mark.xfail(strict=True, reason="A_d is convex in d, so its maximiser over d>=1 is an endpoint, not d_star")
def test_d_star_is_argmax_of_exponent(rng):
    for _ in range(100):
        n = int(rng.integers(2, 40))
        p = GameParams(n, rng.uniform(n / 2 + 1e-3, n), 1.0, 1.0)
        d = np.arange(n + 1)
        arg = d * ((d - 1) / 2 - p.theta * (n - 1) / n)
        assert d_star(p) == 1 + int(np.argmax(arg[1:]))


def test_solve_uniform_interior_root():
    s = solve_uniform(P20.replace(beta=5.0))
    assert s.boundary is Boundary.INTERIOR and s.interior
    assert abs(F(s.w_star, P20.replace(beta=5.0))) <= 1e-9
    assert 0 < s.w_star < 1


def test_solve_uniform_below_threshold_is_degenerate():
    p = P5.replace(beta=0.9 * beta_threshold(P5))
    s = solve_uniform(p)
    assert s.boundary is Boundary.LOWER_DEGENERATE
    assert s.w_star == pytest.approx(1e-6)


def test_solve_uniform_upper_boundary():
    # just above the threshold at N=20 the root lies beyond w=1
    p = P20.replace(beta=2 * beta_threshold(P20))
    s = solve_uniform(p)
    assert s.boundary is Boundary.UPPER and s.w_star == 1.0 and F(1.0, p) <= 0


def test_newton_agrees_with_bisection():
    for beta in (0.5, 1.0, 5.0, 20.0):
        p = P20.replace(beta=beta)
        a, b = solve_uniform(p), solve_uniform_newton(p)
        assert a.w_star == pytest.approx(b.w_star, abs=1e-9)


def test_uniform_root_matches_general_solver():
    s = solve_uniform(P5)
    r = optimize_weights(P5, SparsityPattern.full(5))
    iu = np.triu_indices(5, 1)
    assert np.max(np.abs(r.weights.matrix[iu] - s.w_star)) <= 1e-4


def test_interior_onset():
    for rho in (1.0, 5.0, 10.0):
        p = P20.replace(rho=rho)
        b = interior_onset(p)
        assert F(1.0, p.replace(beta=0.999 * b)) <= 0 < F(1.0, p.replace(beta=1.001 * b))


def test_dw_dbeta_negative_and_matches_resolve():
    h = 1e-4
    for beta in (0.5, 2.0, 8.0):
        p = P20.replace(beta=beta)
        s = solve_uniform(p)
        d = dw_dbeta(p, s.w_star)
        fd = (solve_uniform(p.replace(beta=beta + h)).w_star - solve_uniform(p.replace(beta=beta - h)).w_star) / (2 * h)
        assert d < 0
        assert d == pytest.approx(fd, rel=1e-3)


def test_dw_dbeta_large_beta_asymptote():
    p = P20.replace(beta=50.0)
    s = solve_uniform(p)
    assert dw_dbeta(p, s.w_star) == pytest.approx(-s.w_star / 50.0, rel=0.25)


def test_larger_rho_gives_smaller_weight():
    for beta in (0.5, 2.0, 8.0):
        ws = [solve_uniform(P20.replace(beta=beta, rho=r)).w_star for r in (1, 5, 10)]
        assert ws[0] > ws[1] > ws[2]


def test_beta_sweep_monotone():
    grid = np.geomspace(1.1 * interior_onset(P20), 10, 30)
    rows = beta_sweep(P20, grid)
    w = [r.w_star for r in rows]
    mu = [r.mu_nash for r in rows]
    assert all(b < a for a, b in zip(w[:-1], w[1:]))
    assert all(b > a for a, b in zip(mu[:-1], mu[1:]))
    assert max(mu) < 1
    assert mu_nash(rows[-1].w_star, P20.replace(beta=10.0)) == pytest.approx(mu[-1])
