from .backend import NAME as KERNEL
from .core import (
    CONTRADICTION,
    Budget,
    Contradiction,
    Domains,
    Query,
    Verdict,
    check_model,
    propagate,
    solve,
    solve_with_timeout,
)
from .smtlib import expr_to_smtlib, to_smtlib

__all__ = [
    "CONTRADICTION",
    "KERNEL",
    "Budget",
    "Contradiction",
    "Domains",
    "Query",
    "Verdict",
    "check_model",
    "expr_to_smtlib",
    "propagate",
    "solve",
    "solve_with_timeout",
    "to_smtlib",
]
