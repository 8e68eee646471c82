"""Permutation recovery in permuted monotone matrix models."""
from .core import Permutation, apply_columns, compose, inverse, rank_of, reverse
from .errors import (ConfigError, ConvergenceError, DegenerateInputError, DimensionError,
                     InputDomainError, MonopermError)
from .estimators import (RecoveryOutput, estimate, estimate_blp, estimate_max, estimate_mean,
                         estimate_ptr, estimate_svd)
from .metrics import (LossReport, kendall_tau, kendall_tau_bruteforce, loss_report,
                      loss_up_to_reversal, spearman_footrule, zero_one_loss)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ConvergenceError", "DegenerateInputError", "DimensionError",
    "InputDomainError", "LossReport", "MonopermError", "Permutation", "RecoveryOutput",
    "apply_columns", "compose", "estimate", "estimate_blp", "estimate_max", "estimate_mean",
    "estimate_ptr", "estimate_svd", "inverse", "kendall_tau", "kendall_tau_bruteforce",
    "loss_report", "loss_up_to_reversal", "rank_of", "reverse", "spearman_footrule",
    "zero_one_loss",
]
