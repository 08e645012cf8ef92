"""Edge-weight design for coordination games played under log-linear learning."""

from .game import (
    GameError,
    GameParams,
    NashAction,
    SparsityPattern,
    WeightMatrix,
    algebraic_connectivity,
    all_profiles,
    laplacian,
    nash_action,
    pairwise_payoff,
    potential,
    profile_bits,
    profile_index,
    utility,
    verify_exact_potential,
)
from .gibbs import (
    GibbsDistribution,
    ObjectiveValue,
    RegimeError,
    gibbs_distribution,
    inverse_prob_one,
    inverse_prob_zero,
    objective,
    objective_gradient,
)
from .optimize import (
    OptimizationResult,
    SolverConfig,
    edge_value_symmetrize,
    optimize_weights,
    orbit_symmetrize,
    project_feasible,
)
from .uniform import (
    Boundary,
    F,
    UniformSolution,
    beta_threshold,
    d_star,
    dw_dbeta,
    f_tilde,
    solve_uniform,
)

__version__ = "0.1.0"

__all__ = [
    "algebraic_connectivity",
    "all_profiles",
    "beta_threshold",
    "Boundary",
    "d_star",
    "dw_dbeta",
    "edge_value_symmetrize",
    "F",
    "f_tilde",
    "GameError",
    "GameParams",
    "gibbs_distribution",
    "GibbsDistribution",
    "inverse_prob_one",
    "inverse_prob_zero",
    "laplacian",
    "nash_action",
    "NashAction",
    "objective",
    "objective_gradient",
    "ObjectiveValue",
    "OptimizationResult",
    "optimize_weights",
    "orbit_symmetrize",
    "pairwise_payoff",
    "potential",
    "profile_bits",
    "profile_index",
    "project_feasible",
    "RegimeError",
    "solve_uniform",
    "SolverConfig",
    "SparsityPattern",
    "UniformSolution",
    "utility",
    "verify_exact_potential",
    "WeightMatrix",
]
