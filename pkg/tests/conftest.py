"""Shared fixtures, brute-force oracles and the acceptance summary hook.

The oracles here deliberately avoid the package's vectorised code paths:
profiles come from ``itertools.product`` and sums are plain Python floats.
"""

import itertools
import math

import numpy as np
import pytest

from teaming import GameParams, SparsityPattern, WeightMatrix

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_weights(rng, n, pattern=None, lo=0.0, hi=1.0):
    """Random feasible W with entries drawn uniformly in ``[lo, hi]`` on the pattern."""
    pattern = pattern or SparsityPattern.full(n)
    edges = pattern.edges()
    return WeightMatrix.from_edges(n, edges, rng.uniform(lo, hi, size=len(edges)))


def brute_potential(bits, m, theta):
    """Potential evaluated term by term from its definition."""
    n = len(bits)
    quad = sum(m[i][j] * bits[i] * bits[j] for i in range(n) for j in range(n))
    lin = sum(m[i][j] * bits[j] for i in range(n) for j in range(n))
    total = sum(m[i][j] for i in range(n) for j in range(n))
    return 0.5 * quad - theta / n * lin + theta / (2 * n) * total


def brute_utility(i, bits, m, theta):
    n = len(bits)
    return sum(m[i][j] * bits[i] * (bits[j] - theta / n) for j in range(n))


def brute_profiles(n):
    """All profiles as bit tuples, ordered by integer index (bit i = agent i)."""
    return [tuple((k >> i) & 1 for i in range(n)) for k in range(1 << n)]


def brute_inverse_prob(m, params: GameParams, target):
    """``1 / mu(target)`` by direct summation of exp(beta * (Phi(a) - Phi(target)))."""
    m = np.asarray(m).tolist()
    n = params.n_agents
    ref = brute_potential(target, m, params.theta)
    return sum(math.exp(params.beta * (brute_potential(a, m, params.theta) - ref)) for a in itertools.product((0, 1), repeat=n))


def brute_objective(m, params: GameParams):
    n = params.n_agents
    target = (0,) * n if params.theta > n / 2 else (1,) * n
    return brute_inverse_prob(m, params, target) + 0.5 * params.rho * float(np.sum(m))
