"""Stationary analysis of Markovian multiserver retrial queues."""

from ._core import (
    Error,
    ModelParams,
    SimResult,
    StationaryDistribution,
    analytic_singularity,
    classic_params,
    compare,
    det_V,
    det_V_formula,
    ergodicity,
    fit_tail,
    mmoo_moments,
    ode_residual,
    s1_classic_pmf,
    s1_coefficients,
    s2_coefficients,
    simulate,
    solve,
    solve_truncated,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Error",
    "ModelParams",
    "SimResult",
    "StationaryDistribution",
    "analytic_singularity",
    "classic_params",
    "compare",
    "det_V",
    "det_V_formula",
    "ergodicity",
    "fit_tail",
    "mmoo_moments",
    "ode_residual",
    "s1_classic_pmf",
    "s1_coefficients",
    "s2_coefficients",
    "simulate",
    "solve",
    "solve_truncated",
    "validate",
]
