"""Permutation algebra and the ranking operator.

Conventions
-----------
Permutations are 0-based dense index arrays with ``mapping[i] = pi(i)``.
A permutation acts on the columns of a matrix through :func:`apply_columns`,
which places input column ``pi^{-1}(j)`` at output column ``j``.  With this
choice, for any matrix ``theta`` with nondecreasing nonnegative rows and any
nonnegative weight vector ``w``::

    rank_of(w @ apply_columns(theta, pi)) == inverse(pi)

so ``inverse(rank_of(scores))`` is an estimate of ``pi`` itself.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InputDomainError

__all__ = [
    "Permutation",
    "rank_of",
    "inverse",
    "compose",
    "reverse",
    "apply_columns",
    "as_data_matrix",
]


class Permutation:
    """An immutable bijection on ``{0, ..., p-1}``."""

    __slots__ = ("_mapping",)

    def __init__(self, mapping: Iterable[int]):
        arr = np.array(list(mapping) if not isinstance(mapping, np.ndarray) else mapping)
        if arr.ndim != 1:
            raise InputDomainError("permutation mapping must be one-dimensional")
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise InputDomainError("permutation entries must be integers")
        arr = arr.astype(np.int64)
        if not np.array_equal(np.sort(arr), np.arange(arr.size)):
            raise InputDomainError(f"not a permutation of 0..{arr.size - 1}: {arr.tolist()}")
        arr.setflags(write=False)
        self._mapping = arr

    @classmethod
    def identity(cls, p: int) -> "Permutation":
        return cls(np.arange(p))

    @classmethod
    def from_one_based(cls, values: Iterable[int]) -> "Permutation":
        return cls(np.asarray(list(values), dtype=np.int64) - 1)

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "Permutation":
        # skips validation; only for arrays produced by the algebra below
        obj = cls.__new__(cls)
        arr = np.asarray(arr, dtype=np.int64)
        arr.setflags(write=False)
        obj._mapping = arr
        return obj

    @property
    def mapping(self) -> np.ndarray:
        return self._mapping

    @property
    def size(self) -> int:
        return int(self._mapping.size)

    def one_based(self) -> list[int]:
        return (self._mapping + 1).tolist()

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._mapping, np.arange(self.size)))

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self._mapping.tolist())

    def __getitem__(self, i):
        return self._mapping[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, Permutation):
            return bool(np.array_equal(self._mapping, other._mapping))
        if isinstance(other, (tuple, list, np.ndarray)):
            return bool(np.array_equal(self._mapping, np.asarray(other)))
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._mapping.tobytes())

    def __repr__(self) -> str:
        return f"Permutation({self._mapping.tolist()})"


def _check_same_size(a: Permutation, b: Permutation) -> None:
    if a.size != b.size:
        raise DimensionError(f"permutation sizes differ: {a.size} vs {b.size}")


def rank_of(x: Sequence[float]) -> Permutation:
    """Ascending ranks of ``x``; ties are ranked left to right.

    >>> rank_of([2, 5, 1, 6, 2]).mapping.tolist()
    [1, 3, 0, 4, 2]
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DimensionError("rank_of expects a non-empty vector")
    if not np.all(np.isfinite(x)):
        raise InputDomainError("rank_of: non-finite entry")
    order = np.argsort(x, kind="stable")
    ranks = np.empty_like(order)
    ranks[order] = np.arange(x.size)
    return Permutation._trusted(ranks)


def inverse(pi: Permutation) -> Permutation:
    inv = np.empty_like(pi.mapping)
    inv[pi.mapping] = np.arange(pi.size)
    return Permutation._trusted(inv)


def compose(pi1: Permutation, pi2: Permutation) -> Permutation:
    """``(pi1 o pi2)[i] = pi1[pi2[i]]``."""
    _check_same_size(pi1, pi2)
    return Permutation._trusted(pi1.mapping[pi2.mapping])


def reverse(pi: Permutation) -> Permutation:
    return Permutation._trusted(pi.mapping[::-1].copy())


def as_data_matrix(m, *, min_p: int = 2, name: str = "matrix") -> np.ndarray:
    """Validate and return ``m`` as a float ``(n, p)`` array with finite entries."""
    arr = np.asarray(m, dtype=float)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    n, p = arr.shape
    if n < 1 or p < min_p:
        raise DimensionError(f"{name} needs n >= 1 and p >= {min_p}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputDomainError(f"{name} contains non-finite values")
    return arr


def apply_columns(m, pi: Permutation) -> np.ndarray:
    """Permute columns so that output column ``j`` is input column ``pi^{-1}(j)``."""
    arr = as_data_matrix(m, min_p=1)
    if arr.shape[1] != pi.size:
        raise DimensionError(f"matrix has {arr.shape[1]} columns, permutation has size {pi.size}")
    return arr[:, inverse(pi).mapping]
