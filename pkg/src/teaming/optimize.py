"""Weight design on an arbitrary sparsity pattern by projected gradient descent.

The decision variables are the allowed undirected edges (one value per pair),
so the feasible set apart from connectivity is the box ``[0, 1]^E`` and the
Euclidean projection is a clamp. Connectivity (``lambda_2 >= floor``) is
checked on every accepted iterate and restored by blending toward a uniform
matrix on the pattern when needed.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .game import (
    GameError,
    GameParams,
    SparsityPattern,
    WeightMatrix,
    algebraic_connectivity,
    as_matrix,
    laplacian,
)
from .gibbs import ObjectiveValue, objective, objective_and_gradient

log = logging.getLogger(__name__)

DEFAULT_MAX_N = 15
LARGE_MAX_N = 20


class InfeasiblePatternError(GameError):
    """The sparsity pattern cannot carry a connected graph."""


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 10_000
    step_size_rule: str = "backtracking"
    initial_step: float = 1.0
    armijo_c: float = 1e-4
    shrink: float = 0.5
    gradient_tolerance: float = 1e-8
    objective_tolerance: float = 1e-12
    connectivity_floor: float = 1e-6
    allow_large: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.step_size_rule not in ("fixed", "backtracking"):
            raise ValueError(f"unknown step size rule {self.step_size_rule!r}")
        if not 0 < self.armijo_c < 1 or not 0 < self.shrink < 1:
            raise ValueError("Armijo constants must lie in (0, 1)")
        for name in ("gradient_tolerance", "objective_tolerance", "connectivity_floor", "initial_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def max_n(self) -> int:
        return LARGE_MAX_N if self.allow_large else DEFAULT_MAX_N


@dataclass
class OptimizationResult:
    weights: WeightMatrix
    objective: ObjectiveValue
    iterations: int
    converged: bool
    projected_gradient_norm: float
    lambda2: float
    floor_active: bool = False
    floor_hits: int = 0
    message: str = ""
    history: list = field(default_factory=list, repr=False)


def project_feasible(M, pattern: SparsityPattern) -> WeightMatrix:
    """Euclidean projection onto symmetric, zero-diagonal, in-pattern, [0, 1] matrices."""
    m = np.asarray(M, dtype=float)
    if m.shape != (pattern.n, pattern.n):
        raise GameError(f"matrix shape {m.shape} does not match pattern n={pattern.n}")
    m = 0.5 * (m + m.T)
    m = np.where(pattern.allowed, np.clip(m, 0.0, 1.0), 0.0)
    return WeightMatrix(m)


def orbit_symmetrize(W) -> WeightMatrix:
    """Average of ``P W P^T`` over all permutations: every off-diagonal entry becomes the mean."""
    m = as_matrix(W)
    n = m.shape[0]
    mean = m[np.triu_indices(n, 1)].mean()
    return WeightMatrix.uniform(n, mean)


def edge_value_symmetrize(W, pattern: SparsityPattern) -> WeightMatrix:
    """Give every allowed edge the mean of W's allowed-edge values."""
    m = as_matrix(W)
    if not pattern.conforms(m):
        raise GameError("W has weight outside the pattern")
    edges = pattern.edges()
    mean = np.mean([m[i, j] for i, j in edges])
    return WeightMatrix.from_edges(pattern.n, edges, mean)


def lambda2(W) -> float:
    return algebraic_connectivity(laplacian(W))


class _EdgeSpace:
    """Maps between edge-value vectors and weight matrices for one pattern."""

    def __init__(self, pattern: SparsityPattern):
        self.n = pattern.n
        edges = pattern.edges()
        self.rows = np.array([e[0] for e in edges], dtype=int)
        self.cols = np.array([e[1] for e in edges], dtype=int)

    def matrix(self, x) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        m[self.rows, self.cols] = x
        m[self.cols, self.rows] = x
        return m

    def vector(self, m) -> np.ndarray:
        return np.asarray(m)[self.rows, self.cols].copy()


def _blend_to_floor(x, space: _EdgeSpace, target, target_l2: float, floor: float):
    """Move ``x`` toward ``target`` just far enough that lambda_2 reaches the floor.

    Concavity of lambda_2 makes the linear interpolation of the endpoint
    values a lower bound, so the computed fraction always suffices.
    """
    l2 = lambda2(space.matrix(x))
    if l2 >= floor:
        return x, l2, False
    t = min(1.0, (floor - l2) / (target_l2 - l2))
    y = (1 - t) * x + t * target
    l2 = lambda2(space.matrix(y))
    while l2 < floor and t < 1.0:
        t = min(1.0, 2 * t)
        y = (1 - t) * x + t * target
        l2 = lambda2(space.matrix(y))
    return y, l2, True


def optimize_weights(
    params: GameParams,
    pattern: SparsityPattern,
    config: Optional[SolverConfig] = None,
    initial=None,
) -> OptimizationResult:
    """Minimise ``1/mu(a*) + rho/2 1^T W 1`` over feasible W conforming to ``pattern``.

    Parameters
    ----------
    params : GameParams
    pattern : SparsityPattern
        Allowed edges; must contain a spanning connected subgraph.
    config : SolverConfig, optional
    initial : WeightMatrix or array, optional
        Starting point, projected onto the feasible set. Defaults to 0.5 on
        every allowed edge.

    Returns
    -------
    OptimizationResult
        Best iterate found. ``converged`` is False if the iteration budget ran
        out first.
    """
    config = config or SolverConfig()
    n = params.n_agents
    if pattern.n != n:
        raise GameError(f"pattern has n={pattern.n}, params have n={n}")
    if n > config.max_n:
        raise GameError(f"n={n} exceeds solver guard {config.max_n} (set allow_large for up to {LARGE_MAX_N})")
    if not pattern.is_connected():
        raise InfeasiblePatternError("sparsity pattern admits no connected graph")

    space = _EdgeSpace(pattern)
    floor = config.connectivity_floor
    unit_l2 = lambda2(space.matrix(np.ones(len(space.rows))))
    level = floor / unit_l2
    if level > 1:
        raise InfeasiblePatternError(
            f"connectivity floor {floor} unreachable: lambda_2 of the full-weight pattern is {unit_l2}"
        )
    target = np.full(len(space.rows), level)
    target_l2 = lambda2(space.matrix(target))

    if initial is None:
        x = np.full(len(space.rows), 0.5)
    else:
        x = space.vector(project_feasible(as_matrix(initial), pattern).matrix)
    x, l2, blended = _blend_to_floor(x, space, target, target_l2, floor)
    floor_hits = int(blended)

    def evaluate(v):
        val, grad = objective_and_gradient(space.matrix(v), params)
        return val, grad[space.rows, space.cols]

    val, g = evaluate(x)
    history = [val.total]
    converged = False
    message = "iteration limit reached"
    pg_norm = np.inf
    it = 0
    for it in range(1, config.max_iterations + 1):
        pg_norm = float(np.linalg.norm(x - np.clip(x - g, 0.0, 1.0)))
        if pg_norm <= config.gradient_tolerance:
            converged, message = True, "projected gradient below tolerance"
            it -= 1
            break

        t = config.initial_step
        while True:
            x_new = np.clip(x - t * g, 0.0, 1.0)
            new_val = objective(space.matrix(x_new), params)
            if config.step_size_rule == "fixed":
                break
            if new_val.total <= val.total + config.armijo_c * g @ (x_new - x):
                break
            t *= config.shrink
            if t < 1e-20:
                x_new, new_val = x, val
                break

        x_new, l2_new, blended = _blend_to_floor(x_new, space, target, target_l2, floor)
        if blended:
            floor_hits += 1
            new_val = objective(space.matrix(x_new), params)

        decrease = val.total - new_val.total
        x, l2 = x_new, l2_new
        val, g = evaluate(x)
        history.append(val.total)
        if abs(decrease) <= config.objective_tolerance * max(1.0, abs(val.total)):
            pg_norm = float(np.linalg.norm(x - np.clip(x - g, 0.0, 1.0)))
            converged, message = True, "relative objective decrease below tolerance"
            break

    if not converged:
        log.warning("weight optimisation stopped after %d iterations (|pg|=%.3g)", it, pg_norm)
    return OptimizationResult(
        weights=WeightMatrix(space.matrix(x)),
        objective=val,
        iterations=it,
        converged=converged,
        projected_gradient_norm=pg_norm,
        lambda2=l2,
        floor_active=bool(l2 <= floor * (1 + 1e-3)),
        floor_hits=floor_hits,
        message=message,
        history=history,
    )


def kkt_satisfied(W, params: GameParams, pattern: SparsityPattern, tol: float = 1e-6) -> bool:
    """Sign conditions of the box-constrained optimum on every allowed edge."""
    m = as_matrix(W)
    _, grad = objective_and_gradient(m, params)
    for i, j in pattern.edges():
        w, g = m[i, j], grad[i, j]
        if w <= 0.0:
            ok = g >= -tol
        elif w >= 1.0:
            ok = g <= tol
        else:
            ok = abs(g) <= tol
        if not ok:
            return False
    return True


# --- JSON ------------------------------------------------------------------

def result_to_dict(result: OptimizationResult, params: GameParams, pattern: SparsityPattern) -> dict:
    m = result.weights.matrix
    return {
        "n": params.n_agents,
        "theta": params.theta,
        "beta": params.beta,
        "rho": params.rho,
        "pattern": [[i, j] for i, j in pattern.edges()],
        "weights": [[i, j, float(m[i, j])] for i, j in pattern.edges()],
        "objective": result.objective.as_dict(),
        "lambda2": result.lambda2,
        "iterations": result.iterations,
        "converged": result.converged,
    }


def result_to_json(result: OptimizationResult, params: GameParams, pattern: SparsityPattern, **kw) -> str:
    return json.dumps(result_to_dict(result, params, pattern), **kw)


def weights_from_dict(data: dict):
    """Rebuild ``(params, pattern, weights)`` from the JSON result schema."""
    n = int(data["n"])
    params = GameParams(n, data["theta"], data["beta"], data["rho"])
    pattern = SparsityPattern.from_edges(n, [tuple(e) for e in data["pattern"]])
    W = WeightMatrix.from_edges(n, [(e[0], e[1]) for e in data["weights"]], [e[2] for e in data["weights"]])
    return params, pattern, W
