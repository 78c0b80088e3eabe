"""Exact decision procedure for the compiled verification conditions."""

from .bounds import ACTIVE, INACTIVE, IntervalMap, propagate_bounds
from .delta import DeltaRational
from .search import (
    extract_counterexample,
    FALSIFIED,
    solve,
    SolverConfig,
    SolverResult,
    SolverStats,
    UNKNOWN,
    VERIFIED,
)
from .simplex import (
    Certificate,
    Feasible,
    Infeasible,
    ResourceBudgetExceeded,
    simplex_check,
    Tableau,
    verify_certificate,
)
from .tseitin import CNF, to_cnf

__all__ = [
    "ACTIVE",
    "Certificate",
    "CNF",
    "DeltaRational",
    "FALSIFIED",
    "Feasible",
    "INACTIVE",
    "Infeasible",
    "IntervalMap",
    "ResourceBudgetExceeded",
    "SolverConfig",
    "SolverResult",
    "SolverStats",
    "Tableau",
    "UNKNOWN",
    "VERIFIED",
    "extract_counterexample",
    "propagate_bounds",
    "simplex_check",
    "solve",
    "to_cnf",
    "verify_certificate",
]
