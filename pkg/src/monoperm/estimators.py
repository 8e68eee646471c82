"""Permutation estimators and downstream peak-to-trough ratio estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .core import Permutation, as_data_matrix, inverse, rank_of
from .errors import DegenerateInputError, DimensionError, InputDomainError
from .spectra import DEFAULT_MAX_ITER, DEFAULT_TOL, leading_eigenvector, projection_gram, row_center, top_svd

__all__ = [
    "Method",
    "RecoveryOutput",
    "estimate_blp",
    "estimate_mean",
    "estimate_max",
    "estimate_svd",
    "estimate",
    "estimate_ptr",
    "fit_log_slopes",
]


class Method(str, Enum):
    BLP = "blp"
    MEAN = "mean"
    MAX = "max"
    SVD = "svd"


@dataclass(frozen=True)
class RecoveryOutput:
    permutation: Permutation
    projection_vector: Optional[np.ndarray]
    projection_scores: Optional[np.ndarray]
    method: Method
    degenerate: bool = False


def _from_scores(scores: np.ndarray) -> Permutation:
    return inverse(rank_of(scores))


def _all_equal(scores: np.ndarray) -> bool:
    return bool(np.all(scores == scores[0]))


def estimate_blp(y, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> RecoveryOutput:
    """Best-linear-projection estimator.

    The weight vector is the leading eigenvector of the projection Gram
    matrix; columns are ordered by their projection scores ``w^T y``.
    """
    y = as_data_matrix(y)
    centered = row_center(y)
    if np.abs(centered).max() <= 1e-12 * max(np.abs(y).max(), 1.0):
        raise DegenerateInputError("every row of Y is constant; no projection separates the columns")
    eig = leading_eigenvector(projection_gram(y), tol=tol, max_iter=max_iter)
    w = eig.vector
    scores = w @ y
    return RecoveryOutput(_from_scores(scores), w, scores, Method.BLP)


def estimate_mean(y) -> RecoveryOutput:
    y = as_data_matrix(y)
    n = y.shape[0]
    scores = y.mean(axis=0)
    return RecoveryOutput(_from_scores(scores), np.full(n, 1 / math.sqrt(n)), scores,
                          Method.MEAN, degenerate=_all_equal(scores))


def estimate_max(y) -> RecoveryOutput:
    y = as_data_matrix(y)
    scores = y.max(axis=0)
    return RecoveryOutput(_from_scores(scores), None, scores, Method.MAX,
                          degenerate=_all_equal(scores))


def estimate_svd(y, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> RecoveryOutput:
    """Orders columns by the first right singular vector of the *uncentered* ``y``."""
    y = as_data_matrix(y)
    svd = top_svd(y, 1, tol=tol, max_iter=max_iter)
    v1 = svd.right_vectors[:, 0]
    if np.all(y == y[:, :1]):
        # identical columns: v1 is flat up to rounding, so do not let rounding order them
        return RecoveryOutput(Permutation.identity(y.shape[1]), svd.left_vectors[:, 0], v1,
                              Method.SVD, degenerate=True)
    return RecoveryOutput(_from_scores(v1), svd.left_vectors[:, 0], v1, Method.SVD,
                          degenerate=bool(svd.singular_values[0] == 0))


_ESTIMATORS = {
    Method.BLP: estimate_blp,
    Method.MEAN: lambda y, tol=DEFAULT_TOL: estimate_mean(y),
    Method.MAX: lambda y, tol=DEFAULT_TOL: estimate_max(y),
    Method.SVD: estimate_svd,
}


def estimate(y, method="blp", tol: float = DEFAULT_TOL) -> RecoveryOutput:
    try:
        method = Method(method)
    except ValueError:
        raise InputDomainError(f"unknown method {method!r}") from None
    return _ESTIMATORS[method](y, tol=tol)


def _parse_base(log_base) -> float:
    if isinstance(log_base, str):
        if log_base == "e":
            return math.e
        log_base = float(log_base)
    base = float(log_base)
    if not (base > 0 and base != 1 and math.isfinite(base)):
        raise InputDomainError(f"invalid log base {log_base!r}")
    return base


def fit_log_slopes(y, order: Permutation) -> np.ndarray:
    """Per-row OLS slope of the reordered row against position ``j / (p - 1)``."""
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[np.newaxis, :]
    if y.ndim != 2 or y.shape[1] < 2:
        raise DimensionError("peak-to-trough estimation needs p >= 2 columns")
    y = as_data_matrix(y)
    if order.size != y.shape[1]:
        raise DimensionError(f"order has size {order.size}, matrix has {y.shape[1]} columns")
    p = y.shape[1]
    ordered = y[:, order.mapping]
    x = np.arange(p) / (p - 1)
    xc = x - x.mean()
    return (ordered - ordered.mean(axis=1, keepdims=True)) @ xc / (xc @ xc)


def estimate_ptr(y, order: Permutation, log_base="e") -> np.ndarray:
    """Fitted peak-to-trough ratio for each row.

    ``y`` holds log coverages in base ``log_base`` and ``order[k]`` is the
    column holding the ``k``-th position along the genome (the output of an
    estimator's ``permutation``).  A straight line is fitted to each
    reordered row over positions scaled to ``[0, 1]``; the ratio is
    ``log_base ** slope``.
    """
    base = _parse_base(log_base)
    return base ** fit_log_slopes(y, order)
