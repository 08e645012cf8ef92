"""Asynchronous log-linear learning as a Markov chain over action profiles.

At every step one agent is drawn (uniformly by default) and resamples its
action from the logit rule::

    P(a_i = 1) = 1 / (1 + exp(-beta * (U_i(1, a_-i) - U_i(0, a_-i))))

The random stream is numpy's PCG64, seeded explicitly; ``RNG_ALGORITHM`` is
written next to every exported result.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from .game import GameError, GameParams, all_profiles, as_matrix
from .gibbs import GibbsDistribution

RNG_ALGORITHM = "numpy.PCG64"
TABLE_MAX_N = 16
_BLOCK = 1 << 16


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class ChainState:
    """Current profile and step counter.

    ``rng`` is shared (and advanced) between successive states, so a state
    should not be stepped twice.
    """

    profile: int
    step_count: int
    rng: np.random.Generator

    @classmethod
    def start(cls, n: int, seed: int, profile: Optional[int] = None) -> "ChainState":
        return cls((1 << n) - 1 if profile is None else int(profile), 0, make_rng(seed))


@dataclass(frozen=True)
class EmpiricalDistribution:
    counts: np.ndarray
    total: int

    @property
    def n(self) -> int:
        return int(self.counts.size).bit_length() - 1

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.total

    def __add__(self, other: "EmpiricalDistribution") -> "EmpiricalDistribution":
        if self.counts.shape != other.counts.shape:
            raise GameError("cannot merge empirical distributions of different size")
        return EmpiricalDistribution(self.counts + other.counts, self.total + other.total)


def gain(i: int, profile: int, W, params: GameParams) -> float:
    """``U_i(1, a_-i) - U_i(0, a_-i)``; zero-weight edges contribute nothing."""
    m = as_matrix(W)
    n = m.shape[0]
    bits = (profile >> np.arange(n)) & 1
    bits[i] = 0
    return float(m[i] @ bits + m[i, i] - params.theta / n * m[i].sum())


def update_probability(i: int, profile: int, W, params: GameParams) -> float:
    """Probability that agent ``i`` plays 1 after its revision."""
    return float(expit(params.beta * gain(i, profile, W, params)))


def _probability_table(W, params: GameParams) -> np.ndarray:
    """``table[k, i]``: probability that agent i picks 1 from profile k."""
    m = as_matrix(W)
    n = m.shape[0]
    A = all_profiles(n)
    # Own action excluded: (A @ m.T)[k, i] includes m[i, i] * a_i, which we replace by m[i, i].
    g = A @ m.T - A * np.diag(m) + np.diag(m) - params.theta / n * m.sum(axis=1)
    return expit(params.beta * g)


def _selection(n: int, agent_probs) -> Optional[np.ndarray]:
    if agent_probs is None:
        return None
    p = np.asarray(agent_probs, dtype=float)
    if p.shape != (n,) or np.any(p < 0) or not np.isclose(p.sum(), 1.0):
        raise GameError("agent_probs must be a probability vector of length n")
    return p


def lll_step(state: ChainState, W, params: GameParams, agent_probs=None) -> ChainState:
    m = as_matrix(W)
    n = m.shape[0]
    p = _selection(n, agent_probs)
    i = int(state.rng.integers(n)) if p is None else int(state.rng.choice(n, p=p))
    u = state.rng.random()
    bit = 1 << i
    if u < update_probability(i, state.profile, m, params):
        profile = state.profile | bit
    else:
        profile = state.profile & ~bit
    return ChainState(profile, state.step_count + 1, state.rng)


def run_chain(
    W,
    params: GameParams,
    steps: int,
    burn_in: Optional[int] = None,
    seed: int = 0,
    initial: Optional[int] = None,
    agent_probs=None,
) -> EmpiricalDistribution:
    """Simulate ``steps`` revisions and histogram the profiles visited after ``burn_in``.

    ``burn_in`` defaults to 10% of ``steps``; the chain starts from all-ones
    unless ``initial`` is given.
    """
    m = as_matrix(W)
    n = m.shape[0]
    if burn_in is None:
        burn_in = steps // 10
    if not (isinstance(steps, (int, np.integer)) and isinstance(burn_in, (int, np.integer))):
        raise GameError("steps and burn_in must be integers")
    if not steps > burn_in >= 0:
        raise GameError(f"need steps > burn_in >= 0, got steps={steps}, burn_in={burn_in}")
    if n > TABLE_MAX_N:
        raise GameError(f"run_chain supports n <= {TABLE_MAX_N}")
    sel = _selection(n, agent_probs)
    rng = make_rng(seed)
    flat = _probability_table(m, params).ravel().tolist()
    state = (1 << n) - 1 if initial is None else int(initial)
    counts = np.zeros(1 << n, dtype=np.int64)
    visited = np.empty(_BLOCK, dtype=np.int64)
    done = 0
    while done < steps:
        size = min(_BLOCK, steps - done)
        if sel is None:
            agents = rng.integers(n, size=size).tolist()
        else:
            agents = rng.choice(n, size=size, p=sel).tolist()
        us = rng.random(size).tolist()
        for k in range(size):
            i = agents[k]
            if us[k] < flat[state * n + i]:
                state |= 1 << i
            else:
                state &= ~(1 << i)
            visited[k] = state
        # record states after step index > burn_in
        first = max(0, burn_in - done)
        if first < size:
            counts += np.bincount(visited[first:size], minlength=1 << n)
        done += size
    return EmpiricalDistribution(counts, int(steps - burn_in))


def transition_matrix(W, params: GameParams, agent_probs=None) -> np.ndarray:
    """Exact one-step transition matrix of the chain (``2**N`` square)."""
    m = as_matrix(W)
    n = m.shape[0]
    sel = _selection(n, agent_probs)
    sel = np.full(n, 1.0 / n) if sel is None else sel
    table = _probability_table(m, params)
    size = 1 << n
    P = np.zeros((size, size))
    for k in range(size):
        for i in range(n):
            up, down = k | (1 << i), k & ~(1 << i)
            P[k, up] += sel[i] * table[k, i]
            P[k, down] += sel[i] * (1.0 - table[k, i])
    return P


def tv_distance(emp, gibbs) -> float:
    """Half the L1 distance between an empirical histogram and an exact law."""
    if isinstance(emp, EmpiricalDistribution):
        p = emp.frequencies
    else:
        p = np.asarray(emp, dtype=float)
        p = p / p.sum()
    q = gibbs.probabilities if isinstance(gibbs, GibbsDistribution) else np.asarray(gibbs, dtype=float)
    if p.shape != q.shape:
        raise GameError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def write_frequency_csv(path, emp: EmpiricalDistribution, gibbs) -> None:
    q = gibbs.probabilities if isinstance(gibbs, GibbsDistribution) else np.asarray(gibbs, dtype=float)
    freq = emp.frequencies
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["profile_index", "count", "frequency", "gibbs_probability"])
        for k in range(emp.counts.size):
            w.writerow([k, int(emp.counts[k]), f"{freq[k]:.12g}", f"{q[k]:.12g}"])
