"""Approximately exact line search: line searches, descent drivers and benchmarks."""

from ._aels import (
    INVERSE_GOLDEN,
    aels,
    armijo_backtrack,
    check_theory,
    exact_quadratic_step,
    mgh_problems,
    mgh_value,
    minimize,
    performance_profile,
    read_records,
    run_trial,
    wolfe_search,
)

__all__ = [
    "INVERSE_GOLDEN",
    "aels",
    "armijo_backtrack",
    "check_theory",
    "exact_quadratic_step",
    "mgh_problems",
    "mgh_value",
    "minimize",
    "performance_profile",
    "read_records",
    "run_trial",
    "wolfe_search",
]
