"""Solvers for frictional directed-search markets.

Thin Python surface over the C++ core: meeting functions, market
segmentations, first-best and equilibrium solvers, Hosios diagnostics,
constrained-efficient design, and the brute-force LP/enumeration oracles.
"""

from ._core import (
    AssumptionError,
    BpResult,
    DesignOutcome,
    EquilibriumOutcome,
    HosiosReport,
    LpSolution,
    MeetingFunction,
    OddsCurvature,
    PlannerOutcome,
    PriceCertificate,
    Prior,
    Segmentation,
    SolverError,
    Submarket,
    SurplusSplit,
    ValidationError,
    best_response_tightness,
    binary_segmentation,
    buyer_payoff_of,
    certify,
    check_hosios,
    classify_odds,
    conditional_means,
    design,
    enumerate_bp,
    find_cutoff,
    find_u_bar,
    first_best_benchmark,
    g_u,
    hosios_compatible_split,
    lp_value,
    perfect_segmentation,
    pooled_segmentation,
    posterior_mean_distribution,
    run_cli,
    solve_equilibrium,
    solve_first_best,
    surplus,
    verify_consistency,
    verify_mpc,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionError",
    "BpResult",
    "DesignOutcome",
    "EquilibriumOutcome",
    "HosiosReport",
    "LpSolution",
    "MeetingFunction",
    "OddsCurvature",
    "PlannerOutcome",
    "PriceCertificate",
    "Prior",
    "Segmentation",
    "SolverError",
    "Submarket",
    "SurplusSplit",
    "ValidationError",
    "best_response_tightness",
    "binary_segmentation",
    "buyer_payoff_of",
    "certify",
    "check_hosios",
    "classify_odds",
    "conditional_means",
    "design",
    "enumerate_bp",
    "find_cutoff",
    "find_u_bar",
    "first_best_benchmark",
    "g_u",
    "hosios_compatible_split",
    "lp_value",
    "perfect_segmentation",
    "pooled_segmentation",
    "posterior_mean_distribution",
    "run_cli",
    "solve_equilibrium",
    "solve_first_best",
    "surplus",
    "verify_consistency",
    "verify_mpc",
]
