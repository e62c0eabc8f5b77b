"""Weighted EF1 and fractionally Pareto-optimal allocation of indivisible chores."""

from .core import (
    Allocation,
    CompetitiveState,
    FairnessReport,
    Instance,
    Witness,
    check_ef1,
    check_mpb_certificate,
    check_wef1,
    check_wpef1,
    classify,
)
from .errors import (
    BudgetExceededError,
    FairChoreError,
    SolverInvariantError,
    UnsupportedInstanceError,
    ValidationError,
)
from .three_types import solve_three_types
from .two_chore_types import solve_two_chore_types
from .wps import alg_a, wps

__all__ = [
    "Allocation",
    "BudgetExceededError",
    "CompetitiveState",
    "FairChoreError",
    "FairnessReport",
    "Instance",
    "SolverInvariantError",
    "UnsupportedInstanceError",
    "ValidationError",
    "Witness",
    "alg_a",
    "check_ef1",
    "check_mpb_certificate",
    "check_wef1",
    "check_wpef1",
    "classify",
    "solve_three_types",
    "solve_two_chore_types",
    "wps",
]

__version__ = "0.1.0"
