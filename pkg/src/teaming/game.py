"""Weighted network coordination game.

Agents pick binary actions; each agent plays the pairwise stag-hunt payoff
``a_i * (a_j - theta / N)`` with every neighbour, weighted by ``w_ij``. With a
symmetric weight matrix the game has an exact potential, and the potential
is maximised at the all-zeros profile when ``theta > N/2`` and at all-ones
when ``theta < N/2``.

Action profiles are integers: bit ``i`` of the index is the action of agent
``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

STRUCTURAL_TOL = 1e-12
EIGEN_TOL = 1e-10
MAX_ENUMERATION_N = 20


class GameError(ValueError):
    """Invalid game input."""


@dataclass(frozen=True)
class GameParams:
    n_agents: int
    theta: float
    beta: float
    rho: float

    def __post_init__(self):
        if int(self.n_agents) != self.n_agents or self.n_agents < 2:
            raise GameError(f"n_agents must be an integer >= 2, got {self.n_agents}")
        if not (np.isfinite(self.beta) and self.beta >= 0):
            raise GameError(f"beta must be finite and >= 0, got {self.beta}")
        if not self.rho > 0:
            raise GameError(f"rho must be > 0, got {self.rho}")
        object.__setattr__(self, "n_agents", int(self.n_agents))

    @property
    def is_tie(self) -> bool:
        """True when theta == N/2, where both consensus profiles maximise the potential."""
        return 2 * self.theta == self.n_agents

    def replace(self, **changes) -> "GameParams":
        fields = dict(n_agents=self.n_agents, theta=self.theta, beta=self.beta, rho=self.rho)
        fields.update(changes)
        return GameParams(**fields)


class WeightMatrix:
    """Symmetric, zero-diagonal edge weights in [0, 1].

    The checked constructor keeps only the strict upper triangle and mirrors
    it, so ``w_ij == w_ji`` holds bit for bit. The stored array is read-only.
    """

    __slots__ = ("_m",)

    def __init__(self, matrix, *, _checked: bool = True):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GameError(f"weight matrix must be square, got shape {m.shape}")
        if _checked:
            if m.shape[0] < 2:
                raise GameError("weight matrix needs at least 2 agents")
            if not np.all(np.isfinite(m)):
                raise GameError("weight matrix has non-finite entries")
            if np.max(np.abs(m - m.T)) > STRUCTURAL_TOL:
                raise GameError("weight matrix must be symmetric")
            if np.max(np.abs(np.diag(m))) > STRUCTURAL_TOL:
                raise GameError("weight matrix must have a zero diagonal")
            upper = np.triu(m, 1)
            if upper.min() < -STRUCTURAL_TOL or upper.max() > 1 + STRUCTURAL_TOL:
                raise GameError("weights must lie in [0, 1]")
            upper = np.clip(upper, 0.0, 1.0)
            m = upper + upper.T
        m.flags.writeable = False
        self._m = m

    @classmethod
    def unchecked(cls, matrix) -> "WeightMatrix":
        """Wrap ``matrix`` as-is. Only meant for negative tests (e.g. asymmetric W)."""
        return cls(matrix, _checked=False)

    @classmethod
    def zeros(cls, n: int) -> "WeightMatrix":
        return cls(np.zeros((n, n)))

    @classmethod
    def uniform(cls, n: int, w: float) -> "WeightMatrix":
        """``w * (11^T - I)``: complete graph, equal weights."""
        return cls(w * (np.ones((n, n)) - np.eye(n)))

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[Tuple[int, int]], values) -> "WeightMatrix":
        """Build from an undirected edge list; ``values`` is a scalar or one value per edge."""
        edges = [tuple(e) for e in edges]
        vals = np.broadcast_to(np.asarray(values, dtype=float), (len(edges),))
        m = np.zeros((n, n))
        for (i, j), v in zip(edges, vals):
            if i == j:
                raise GameError(f"self-loop ({i}, {j}) not allowed")
            m[i, j] = m[j, i] = v
        return cls(m)

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def n(self) -> int:
        return self._m.shape[0]

    def edge_values(self) -> np.ndarray:
        """Strict upper-triangle entries, row-major."""
        return self._m[np.triu_indices(self.n, 1)]

    def total_weight(self) -> float:
        """``1^T W 1`` (each undirected edge counted twice)."""
        return float(self._m.sum())

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return np.array_equal(self._m, other._m)

    def __hash__(self):
        return hash(self._m.tobytes())

    def __repr__(self):
        return f"WeightMatrix(n={self.n}, nonzero_edges={np.count_nonzero(self.edge_values())})"


def as_matrix(W) -> np.ndarray:
    """Plain ndarray view of a WeightMatrix or array-like."""
    if isinstance(W, WeightMatrix):
        return W.matrix
    return np.asarray(W, dtype=float)


class SparsityPattern:
    """Symmetric boolean mask of edges that may carry weight."""

    __slots__ = ("_mask",)

    def __init__(self, allowed):
        mask = np.array(allowed, dtype=bool)
        if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
            raise GameError(f"pattern must be square, got shape {mask.shape}")
        if not np.array_equal(mask, mask.T):
            raise GameError("sparsity pattern must be symmetric")
        if mask.diagonal().any():
            raise GameError("sparsity pattern must have a zero diagonal")
        mask.flags.writeable = False
        self._mask = mask

    @classmethod
    def full(cls, n: int) -> "SparsityPattern":
        return cls(~np.eye(n, dtype=bool))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "SparsityPattern":
        mask = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise GameError(f"self-loop ({i}, {j}) not allowed")
            mask[i, j] = mask[j, i] = True
        return cls(mask)

    @property
    def allowed(self) -> np.ndarray:
        return self._mask

    @property
    def n(self) -> int:
        return self._mask.shape[0]

    def edges(self) -> list:
        """Allowed edges as ``(i, j)`` with ``i < j``, row-major."""
        iu, ju = np.nonzero(np.triu(self._mask, 1))
        return [(int(i), int(j)) for i, j in zip(iu, ju)]

    def is_connected(self) -> bool:
        """Whether the allowed edges span a connected graph on all nodes."""
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in np.nonzero(self._mask[i])[0]:
                if int(j) not in seen:
                    seen.add(int(j))
                    stack.append(int(j))
        return len(seen) == self.n

    def conforms(self, W) -> bool:
        return not np.any(as_matrix(W)[~self._mask])

    def __repr__(self):
        return f"SparsityPattern(n={self.n}, edges={len(self.edges())})"


# --- action profiles -------------------------------------------------------

def profile_bits(index: int, n: int) -> np.ndarray:
    """Actions of profile ``index`` as a length-``n`` 0/1 vector."""
    if not 0 <= index < (1 << n):
        raise GameError(f"profile index {index} out of range for n={n}")
    return ((index >> np.arange(n)) & 1).astype(np.int8)


def profile_index(bits) -> int:
    bits = np.asarray(bits, dtype=np.int64)
    if np.any((bits != 0) & (bits != 1)):
        raise GameError("actions must be 0 or 1")
    return int((bits << np.arange(bits.size)).sum())


def profile_block(start: int, stop: int, n: int) -> np.ndarray:
    """Bit matrix for profile indices ``start..stop-1`` (shape ``(stop-start, n)``)."""
    idx = np.arange(start, stop, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(float)


def all_profiles(n: int) -> np.ndarray:
    """All ``2**n`` profiles as rows, ascending integer order."""
    if n > MAX_ENUMERATION_N:
        raise GameError(f"refusing to enumerate 2**{n} profiles (limit n <= {MAX_ENUMERATION_N})")
    return profile_block(0, 1 << n, n)


def all_zeros(n: int) -> int:
    return 0


def all_ones(n: int) -> int:
    return (1 << n) - 1


# --- payoffs and potential -------------------------------------------------

def pairwise_payoff(a_i: int, a_j: int, params: GameParams) -> float:
    if a_i not in (0, 1) or a_j not in (0, 1):
        raise GameError("actions must be 0 or 1")
    return a_i * (a_j - params.theta / params.n_agents)


def _bits_of(a, n: int) -> np.ndarray:
    if isinstance(a, (int, np.integer)):
        return profile_bits(int(a), n).astype(float)
    bits = np.asarray(a, dtype=float)
    if bits.shape != (n,):
        raise GameError(f"profile has shape {bits.shape}, expected ({n},)")
    return bits


def utility(i: int, a, W, params: GameParams) -> float:
    """Payoff of agent ``i``: ``a_i * (sum_j w_ij a_j - theta/N * sum_j w_ij)``."""
    m = as_matrix(W)
    n = m.shape[0]
    if not 0 <= i < n:
        raise GameError(f"agent index {i} out of range for n={n}")
    a = _bits_of(a, n)
    row = m[i]
    return float(a[i] * (row @ a - params.theta / n * row.sum()))


def potential(a, W, params: GameParams) -> float:
    """``1/2 a^T W a - theta/N 1^T W a + theta/(2N) 1^T W 1``."""
    m = as_matrix(W)
    n = m.shape[0]
    a = _bits_of(a, n)
    c = params.theta / n
    return float(0.5 * a @ m @ a - c * m.sum(axis=0) @ a + 0.5 * c * m.sum())


def verify_exact_potential(W, params: GameParams, tol: float = STRUCTURAL_TOL) -> bool:
    """Check the unilateral-deviation identity for every profile and agent.

    Exhaustive over all ``2**N`` profiles, so ``N`` is capped at 20.
    """
    m = as_matrix(W)
    n = m.shape[0]
    if n > MAX_ENUMERATION_N:
        raise GameError(f"n={n} exceeds enumeration guard {MAX_ENUMERATION_N}")
    A = all_profiles(n)
    c = params.theta / n
    col = m.sum(axis=0)

    def phi(X):
        return 0.5 * np.einsum("ki,ij,kj->k", X, m, X) - c * (X @ col)

    for i in range(n):
        a1 = A.copy()
        a1[:, i] = 1.0
        a0 = A.copy()
        a0[:, i] = 0.0
        # U_i(0, a_-i) = 0, so the utility difference is U_i(1, a_-i).
        du = a1 @ m[i] - c * m[i].sum()
        if np.max(np.abs(du - (phi(a1) - phi(a0)))) > tol:
            return False
    return True


def laplacian(W) -> np.ndarray:
    """``diag(W 1) - W``."""
    m = as_matrix(W)
    return np.diag(m.sum(axis=1)) - m


def algebraic_connectivity(L) -> float:
    """Second-smallest eigenvalue of a symmetric Laplacian."""
    L = np.asarray(L, dtype=float)
    try:
        eig = np.linalg.eigvalsh(L)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"eigensolver failed: {exc}") from exc
    return float(eig[1])


@dataclass(frozen=True)
class NashAction:
    """Potential maximiser. ``profile`` is None on the theta == N/2 tie."""

    n: int
    profile: Optional[int]
    candidates: Tuple[int, ...]

    @property
    def tie(self) -> bool:
        return self.profile is None

    @property
    def is_zero(self) -> bool:
        return self.profile == 0


def nash_action(params: GameParams) -> NashAction:
    n = params.n_agents
    if params.is_tie:
        return NashAction(n, None, (all_zeros(n), all_ones(n)))
    if params.theta > n / 2:
        return NashAction(n, all_zeros(n), (all_zeros(n),))
    return NashAction(n, all_ones(n), (all_ones(n),))
