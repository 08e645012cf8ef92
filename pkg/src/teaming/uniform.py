"""One-dimensional design problem for the complete graph with equal weights.

With ``W = w (11^T - I)`` the exponent of profile ``a`` only depends on the
number ``d`` of agents playing 1, so the ``2**N`` sum collapses to ``N + 1``
binomially weighted terms::

    f(w) = sum_d C(N, d) exp(beta w A_d) + rho/2 w N (N - 1)
    A_d  = (d^2 - d)/2 - theta (N - 1) d / N

Only the ``theta > N/2`` regime (all-zeros equilibrium) is covered; there
every ``A_d`` with ``d >= 1`` is negative and ``F = f'`` is strictly
increasing, so its root is found by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .game import GameError, GameParams
from .gibbs import RegimeError

DEFAULT_CONNECTIVITY_FLOOR = 1e-6
ROOT_RESIDUAL_TOL = 1e-9


class Boundary(str, Enum):
    INTERIOR = "interior"
    UPPER = "upper_boundary"
    LOWER_DEGENERATE = "lower_degenerate"


@dataclass(frozen=True)
class CoefficientTable:
    binomials: np.ndarray
    a_coeffs: np.ndarray

    @property
    def n(self) -> int:
        return len(self.a_coeffs) - 1


@dataclass(frozen=True)
class UniformSolution:
    w_star: float
    objective: float
    boundary: Boundary
    F_at_w: float
    iterations: int = 0

    @property
    def interior(self) -> bool:
        return self.boundary is Boundary.INTERIOR


def _require_zero_regime(params: GameParams):
    if not params.theta > params.n_agents / 2:
        raise RegimeError(
            f"the 1-D reduction is derived for theta > N/2 only (got theta={params.theta}, N={params.n_agents})"
        )


def coefficient_table(params: GameParams) -> CoefficientTable:
    n = params.n_agents
    d = np.arange(n + 1, dtype=float)
    if n <= 60:
        binom = np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)
    else:
        lg = math.lgamma
        binom = np.array([math.exp(lg(n + 1) - lg(k + 1) - lg(n - k + 1)) for k in range(n + 1)])
    a = (d * d - d) / 2.0 - params.theta / n * (n - 1) * d
    return CoefficientTable(binomials=binom, a_coeffs=a)


def _terms(w: float, params: GameParams, table: CoefficientTable | None = None):
    table = table or coefficient_table(params)
    return table, table.binomials * np.exp(params.beta * w * table.a_coeffs)


def _check_w(w: float):
    if not 0.0 <= w <= 1.0:
        raise GameError(f"w must lie in [0, 1], got {w}")


def f_tilde(w: float, params: GameParams) -> float:
    _require_zero_regime(params)
    _check_w(w)
    n = params.n_agents
    _, t = _terms(w, params)
    return float(np.sum(t) + 0.5 * params.rho * w * n * (n - 1))


def F(w: float, params: GameParams) -> float:
    """Derivative of :func:`f_tilde` in ``w``."""
    _require_zero_regime(params)
    _check_w(w)
    n = params.n_agents
    table, t = _terms(w, params)
    return float(np.sum(t * params.beta * table.a_coeffs) + 0.5 * params.rho * n * (n - 1))


def F_prime(w: float, params: GameParams) -> float:
    _require_zero_regime(params)
    table, t = _terms(w, params)
    return float(np.sum(t * (params.beta * table.a_coeffs) ** 2))


def mu_nash(w: float, params: GameParams) -> float:
    """Stationary probability of the all-zeros profile at ``w (11^T - I)``."""
    _require_zero_regime(params)
    _, t = _terms(w, params)
    return float(1.0 / np.sum(t))


def beta_threshold(params: GameParams) -> float:
    """Smallest rationality at which ``F(0) < 0``: ``2**(2-N) rho N / (4 theta - N)``."""
    n = params.n_agents
    denom = 4.0 * params.theta - n
    if denom == 0:
        raise GameError("beta threshold undefined for 4*theta == N")
    return 2.0 ** (2 - n) * params.rho * n / denom


def d_star(params: GameParams) -> int:
    """Closed-form term index ``ceil(theta (N-1)/N + 1/2)``, clamped to ``[0, N]``.

    ``A_d`` is a convex quadratic in ``d`` with vertex at ``theta (N-1)/N + 1/2``,
    so this index sits at (or one step past) the most negative exponent. The
    term that actually dominates the sum as beta grows is the largest ``A_d``
    over ``d >= 1``, which is always ``d = 1`` or ``d = N``.
    """
    _require_zero_regime(params)
    n = params.n_agents
    d = math.ceil(params.theta * (n - 1) / n + 0.5)
    return int(min(max(d, 0), n))


def _bisect(params: GameParams, lo: float, hi: float, tol: float):
    it = 0
    table = coefficient_table(params)
    n = params.n_agents
    lin = 0.5 * params.rho * n * (n - 1)

    def g(w):
        return float(np.sum(table.binomials * np.exp(params.beta * w * table.a_coeffs) * params.beta * table.a_coeffs) + lin)

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
        it += 1
    # A couple of bracketed Newton steps shrink |F| to rounding level.
    w = 0.5 * (lo + hi)
    for _ in range(4):
        fw = g(w)
        if fw == 0:
            break
        if fw > 0:
            hi = w
        else:
            lo = w
        step = w - fw / F_prime(w, params)
        w = step if lo <= step <= hi else 0.5 * (lo + hi)
        it += 1
    return w, it


def solve_uniform(
    params: GameParams,
    tol: float = 1e-10,
    connectivity_floor: float = DEFAULT_CONNECTIVITY_FLOOR,
) -> UniformSolution:
    """Minimise ``f_tilde`` over ``(0, 1]``.

    ``F(0) >= 0`` means the penalty dominates and no minimiser exists on the
    open interval; the floor weight is returned with ``LOWER_DEGENERATE``.
    """
    _require_zero_regime(params)
    f0 = F(0.0, params)
    f1 = F(1.0, params)
    if f0 >= 0:
        w = connectivity_floor
        return UniformSolution(w, f_tilde(w, params), Boundary.LOWER_DEGENERATE, F(w, params))
    if f1 <= 0:
        return UniformSolution(1.0, f_tilde(1.0, params), Boundary.UPPER, f1)
    w, it = _bisect(params, 0.0, 1.0, tol)
    return UniformSolution(w, f_tilde(w, params), Boundary.INTERIOR, F(w, params), it)


def solve_uniform_newton(params: GameParams, tol: float = 1e-12, max_iter: int = 200) -> UniformSolution:
    """Independent root finder: Newton from 0.5, falling back to bisection steps.

    Used as a cross-check of :func:`solve_uniform`; boundary cases are
    classified the same way.
    """
    _require_zero_regime(params)
    if F(0.0, params) >= 0 or F(1.0, params) <= 0:
        return solve_uniform(params)
    lo, hi, w = 0.0, 1.0, 0.5
    for it in range(1, max_iter + 1):
        fw = F(w, params)
        if fw > 0:
            hi = w
        else:
            lo = w
        nxt = w - fw / F_prime(w, params)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - w) <= tol:
            w = nxt
            break
        w = nxt
    return UniformSolution(w, f_tilde(w, params), Boundary.INTERIOR, F(w, params), it)


def interior_onset(params: GameParams, beta_max: float = 1e3) -> float:
    """Smallest beta above which ``F(1) > 0``, i.e. the root is strictly inside (0, 1).

    Between :func:`beta_threshold` and this value the optimum sits at
    ``w = 1``. Located by bisection on ``log(beta)``; raises if ``F(1) <= 0``
    still holds at ``beta_max``.
    """
    _require_zero_regime(params)

    def f1(b):
        return F(1.0, params.replace(beta=b))

    lo = beta_threshold(params)
    if f1(beta_max) <= 0:
        raise GameError(f"F(1) <= 0 up to beta={beta_max}")
    # Walk up from the threshold to the first beta where F(1) <= 0 (if any).
    grid = np.geomspace(lo * (1 + 1e-9), beta_max, 400)
    vals = np.array([f1(b) for b in grid])
    if np.all(vals > 0):
        return float(lo)
    last_bad = np.nonzero(vals <= 0)[0].max()
    a, b = np.log(grid[last_bad]), np.log(grid[last_bad + 1])
    for _ in range(100):
        mid = 0.5 * (a + b)
        if f1(np.exp(mid)) > 0:
            b = mid
        else:
            a = mid
    return float(np.exp(b))


def dw_dbeta(params: GameParams, w_star: float) -> float:
    """Sensitivity of the interior root to beta (implicit function theorem)."""
    _require_zero_regime(params)
    table = coefficient_table(params)
    a = table.a_coeffs
    b = params.beta
    e = table.binomials * np.exp(b * w_star * a)
    denom = b * b * np.sum(e * a * a)
    if denom == 0:
        raise ZeroDivisionError("dw/dbeta denominator vanished")
    return float(-np.sum(e * (a + b * w_star * a * a)) / denom)


@dataclass(frozen=True)
class SweepRow:
    beta: float
    w_star: float
    f_tilde: float
    mu_nash: float
    dw_dbeta: float
    boundary: Boundary


def beta_sweep(params: GameParams, betas, tol: float = 1e-10) -> list:
    """Solve the uniform problem at each beta of ``betas`` (params.beta is ignored)."""
    rows = []
    for b in betas:
        p = params.replace(beta=float(b))
        sol = solve_uniform(p, tol=tol)
        slope = dw_dbeta(p, sol.w_star) if sol.interior else float("nan")
        rows.append(SweepRow(float(b), sol.w_star, sol.objective, mu_nash(sol.w_star, p), slope, sol.boundary))
    return rows
