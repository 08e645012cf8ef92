import math

import numpy as np
import pytest
from scipy import stats

from conftest import random_weights
from teaming import GameError, GameParams, WeightMatrix, gibbs_distribution
from teaming.chain import (
    ChainState,
    EmpiricalDistribution,
    gain,
    lll_step,
    run_chain,
    transition_matrix,
    tv_distance,
    update_probability,
    write_frequency_csv,
)

W2 = WeightMatrix([[0, 1], [1, 0]])
W5 = WeightMatrix.uniform(5, 0.5)
P5 = GameParams(5, 3, 1.0, 1.0)


def test_beta_zero_update_is_fair_coin(rng):
    W = random_weights(rng, 4)
    p = GameParams(4, 3, 0.0, 1)
    for k in range(16):
        for i in range(4):
            assert update_probability(i, k, W, p) == 0.5


def test_large_beta_follows_best_response():
    p = GameParams(2, 1, 50.0, 1)
    # agent 0 revises while agent 1 plays 1: gain = 1 - 1/2
    assert gain(0, 0b10, W2, p) == pytest.approx(0.5)
    assert update_probability(0, 0b10, W2, p) == pytest.approx(1 / (1 + math.exp(-25)), rel=1e-15)
    assert update_probability(0, 0b00, W2, p) == pytest.approx(1 / (1 + math.exp(25)), rel=1e-12)


def test_gain_ignores_own_action(rng):
    W = random_weights(rng, 5)
    for k in range(32):
        for i in range(5):
            assert gain(i, k, W, P5) == pytest.approx(gain(i, k ^ (1 << i), W, P5), abs=1e-15)


def test_lll_step_changes_at_most_one_agent():
    state = ChainState.start(5, seed=3)
    assert state.profile == 31
    for _ in range(200):
        nxt = lll_step(state, W5, P5)
        assert bin(state.profile ^ nxt.profile).count("1") <= 1
        assert nxt.step_count == state.step_count + 1
        state = nxt


def test_lll_step_is_deterministic():
    def trajectory(seed):
        s = ChainState.start(4, seed=seed, profile=0)
        out = []
        for _ in range(50):
            s = lll_step(s, WeightMatrix.uniform(4, 0.7), GameParams(4, 3, 2.0, 1))
            out.append(s.profile)
        return out

    assert trajectory(11) == trajectory(11)
    assert trajectory(11) != trajectory(12)


def test_same_seed_same_counts():
    a = run_chain(W5, P5, 20_000, seed=7)
    b = run_chain(W5, P5, 20_000, seed=7)
    np.testing.assert_array_equal(a.counts, b.counts)
    assert a.total == 18_000 and a.counts.sum() == a.total


def test_argument_validation():
    with pytest.raises(GameError):
        run_chain(W5, P5, 100, burn_in=100)
    with pytest.raises(GameError):
        run_chain(W5, P5, 100, agent_probs=[0.5, 0.5])


def test_transition_matrix_rows_and_detailed_balance():
    for W, p in ((W2, GameParams(2, 1.5, 1.3, 1)), (WeightMatrix.uniform(3, 0.4), GameParams(3, 2, 2.0, 1))):
        P = transition_matrix(W, p)
        np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-15)
        mu = gibbs_distribution(W, p).probabilities
        flow = mu[:, None] * P
        np.testing.assert_allclose(flow, flow.T, atol=1e-15)
        np.testing.assert_allclose(mu @ P, mu, atol=1e-15)


def test_gibbs_is_stationary_for_nonuniform_selection(rng):
    W = random_weights(rng, 4)
    p = GameParams(4, 3, 1.5, 1)
    P = transition_matrix(W, p, agent_probs=[0.1, 0.2, 0.3, 0.4])
    mu = gibbs_distribution(W, p).probabilities
    np.testing.assert_allclose(mu @ P, mu, atol=1e-14)


def test_tv_distance_examples():
    mu = gibbs_distribution(W5, P5)
    exact = EmpiricalDistribution(np.round(mu.probabilities * 1e12).astype(np.int64), 0)
    exact = EmpiricalDistribution(exact.counts, int(exact.counts.sum()))
    assert tv_distance(exact, mu) < 1e-11
    assert tv_distance([1, 0], [0.5, 0.5]) == pytest.approx(0.5)
    with pytest.raises(GameError):
        tv_distance([1, 0, 0], [0.5, 0.5])


def test_nash_frequency_matches_gibbs():
    emp = run_chain(W5, P5, 1_000_000, burn_in=100_000, seed=1)
    mu0 = gibbs_distribution(W5, P5).prob(0)
    assert abs(emp.frequencies[0] - mu0) <= 0.01


def test_beta_zero_frequencies_uniform():
    emp = run_chain(W5, GameParams(5, 3, 0.0, 1), 1_000_000, seed=2)
    assert np.max(np.abs(emp.frequencies - 1 / 32)) <= 0.005


def test_beta_zero_chi_squared():
    # Keep every 20th state of one trajectory; at beta=0 each revision redraws a
    # fair bit, so after 20 revisions of 3 agents the samples are nearly independent.
    W, p = WeightMatrix.uniform(3, 0.5), GameParams(3, 2, 0.0, 1)
    state = ChainState.start(3, seed=5)
    counts = np.zeros(8, dtype=int)
    for step in range(1, 4000 * 20 + 1):
        state = lll_step(state, W, p)
        if step % 20 == 0:
            counts[state.profile] += 1
    assert stats.chisquare(counts).pvalue > 1e-3


def test_empirical_merge():
    a = run_chain(W5, P5, 10_000, seed=1)
    b = run_chain(W5, P5, 10_000, seed=2)
    c = a + b
    assert c.total == a.total + b.total and c.n == 5


def test_frequency_csv(tmp_path):
    emp = run_chain(W5, P5, 5_000, seed=0)
    path = tmp_path / "freq.csv"
    write_frequency_csv(path, emp, gibbs_distribution(W5, P5))
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "profile_index,count,frequency,gibbs_probability"
    assert len(lines) == 33
