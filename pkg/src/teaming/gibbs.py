"""Exact Gibbs stationary law of log-linear learning and the design objective.

Everything here enumerates all ``2**N`` profiles in ascending integer order,
in fixed-size chunks. Each chunk is reduced in the log domain (subtract the
chunk max, exponentiate, sum) and chunks are merged at the end, so results
do not depend on how the work is split.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import GameError, GameParams, as_matrix, nash_action, profile_block

MAX_GIBBS_N = 25
CHUNK = 1 << 15


class RegimeError(GameError):
    """Operation called for the wrong equilibrium regime."""


@dataclass(frozen=True)
class GibbsDistribution:
    n: int
    log_weights: np.ndarray
    log_partition: float

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_partition)

    def prob(self, index: int) -> float:
        return float(np.exp(self.log_weights[index] - self.log_partition))

    def mode(self) -> int:
        return int(np.argmax(self.log_weights))


@dataclass(frozen=True)
class ObjectiveValue:
    inverse_prob: float
    penalty: float
    total: float

    @classmethod
    def build(cls, inverse_prob: float, penalty: float) -> "ObjectiveValue":
        return cls(float(inverse_prob), float(penalty), float(inverse_prob) + float(penalty))

    def as_dict(self) -> dict:
        return {"inverse_prob": self.inverse_prob, "penalty": self.penalty, "total": self.total}


def _check_n(n: int):
    if n > MAX_GIBBS_N:
        raise GameError(f"n={n} exceeds the exact-enumeration guard ({MAX_GIBBS_N})")


def _chunks(n: int):
    total = 1 << n
    for start in range(0, total, CHUNK):
        yield profile_block(start, min(start + CHUNK, total), n)


def gibbs_distribution(W, params: GameParams) -> GibbsDistribution:
    """Stationary law ``mu(a) ∝ exp(beta * Phi_W(a))``, by full enumeration."""
    m = as_matrix(W)
    n = m.shape[0]
    _check_n(n)
    c = params.theta / n
    col = m.sum(axis=0)
    const = 0.5 * c * m.sum()
    parts = []
    for A in _chunks(n):
        phi = 0.5 * np.einsum("ki,ij,kj->k", A, m, A) - c * (A @ col) + const
        parts.append(params.beta * phi)
    logw = np.concatenate(parts)
    top = logw.max()
    log_z = top + np.log(np.sum(np.exp(logw - top)))
    logw.flags.writeable = False
    return GibbsDistribution(n=n, log_weights=logw, log_partition=float(log_z))


def _shift(params: GameParams, target_zero: bool) -> float:
    """Coefficient of ``1^T W 1`` in the exponent of ``1/mu(a*)``."""
    return 0.0 if target_zero else params.theta / params.n_agents - 0.5


def _stream(m: np.ndarray, params: GameParams, target_zero: bool, with_grad: bool):
    """Sum exp(beta * (Phi(a) - Phi(a*))) over all profiles, optionally with its gradient.

    Returns ``(log_sum, grad_or_None)``; the gradient is with respect to each
    unordered pair ``{i, j}`` and is already scaled back out of the log domain.
    """
    n = m.shape[0]
    _check_n(n)
    beta = params.beta
    c = params.theta / n
    k = _shift(params, target_zero)
    col = m.sum(axis=0)
    offset = k * m.sum()
    maxes, sums, seconds, firsts = [], [], [], []
    for A in _chunks(n):
        e = beta * (0.5 * np.einsum("ki,ij,kj->k", A, m, A) - c * (A @ col) + offset)
        top = e.max()
        p = np.exp(e - top)
        maxes.append(top)
        sums.append(p.sum())
        if with_grad:
            firsts.append(A.T @ p)
            seconds.append((A * p[:, None]).T @ A)
    maxes = np.asarray(maxes)
    top = maxes.max()
    scale = np.exp(maxes - top)
    total = np.sum(np.asarray(sums) * scale)
    log_sum = top + np.log(total)
    if not with_grad:
        return log_sum, None
    S = np.exp(log_sum)
    second = np.tensordot(scale, np.asarray(seconds), axes=1) * np.exp(top)
    first = np.tensordot(scale, np.asarray(firsts), axes=1) * np.exp(top)
    # d e_a / d w_{ij} (pair) = beta * (a_i a_j - c (a_i + a_j) + 2k)
    grad = beta * (second - c * (first[:, None] + first[None, :]) + 2.0 * k * S)
    grad = 0.5 * (grad + grad.T)
    np.fill_diagonal(grad, 0.0)
    return log_sum, grad


def inverse_prob_zero(W, params: GameParams) -> float:
    """``1 / mu(0)``; valid in the theta > N/2 regime."""
    if not params.theta > params.n_agents / 2:
        raise RegimeError("inverse_prob_zero needs theta > N/2")
    log_sum, _ = _stream(as_matrix(W), params, True, False)
    return float(np.exp(log_sum))


def inverse_prob_one(W, params: GameParams) -> float:
    """``1 / mu(1)``; valid in the theta < N/2 regime."""
    if not params.theta < params.n_agents / 2:
        raise RegimeError("inverse_prob_one needs theta < N/2")
    log_sum, _ = _stream(as_matrix(W), params, False, False)
    return float(np.exp(log_sum))


def _target_is_zero(params: GameParams) -> bool:
    eq = nash_action(params)
    if eq.tie:
        raise RegimeError(
            f"theta == N/2 ({params.theta}): both consensus profiles maximise the potential"
        )
    return eq.is_zero


def penalty(W, params: GameParams) -> float:
    return 0.5 * params.rho * float(as_matrix(W).sum())


def objective(W, params: GameParams) -> ObjectiveValue:
    """``1/mu(a*) + rho/2 * 1^T W 1`` with ``a*`` picked by the Nash regime."""
    m = as_matrix(W)
    log_sum, _ = _stream(m, params, _target_is_zero(params), False)
    return ObjectiveValue.build(np.exp(log_sum), penalty(m, params))


def objective_and_gradient(W, params: GameParams):
    """Objective plus pair-tied gradient from a single enumeration pass."""
    m = as_matrix(W)
    log_sum, grad = _stream(m, params, _target_is_zero(params), True)
    grad = grad + params.rho
    np.fill_diagonal(grad, 0.0)
    return ObjectiveValue.build(np.exp(log_sum), penalty(m, params)), grad


def objective_gradient(W, params: GameParams) -> np.ndarray:
    """Symmetric matrix of ``d f0 / d w_ij`` where ``w_ij`` and ``w_ji`` move together."""
    return objective_and_gradient(W, params)[1]
