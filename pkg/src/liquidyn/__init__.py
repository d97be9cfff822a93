"""Liquidity-flow balance engine for macro-financial systemic-risk analysis."""

__version__ = "0.1.0"

from liquidyn.errors import DegenerateInputError, ValidationError
from liquidyn.model import (
    BalanceResult,
    ParameterSet,
    balance,
    decompose_epsilon,
    eval_lhs,
    eval_rhs,
    eval_rhs_partial,
    imbalance,
    required_epsilon,
)

__all__ = [
    "__version__",
    "BalanceResult",
    "DegenerateInputError",
    "ParameterSet",
    "ValidationError",
    "balance",
    "decompose_epsilon",
    "eval_lhs",
    "eval_rhs",
    "eval_rhs_partial",
    "imbalance",
    "required_epsilon",
]
