"""Losses for exact and partial permutation recovery."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Permutation, inverse, reverse
from .errors import DimensionError, InputDomainError

__all__ = [
    "Metric",
    "LossReport",
    "zero_one_loss",
    "count_inversions",
    "discordant_pairs",
    "kendall_tau",
    "kendall_tau_bruteforce",
    "spearman_footrule",
    "loss_up_to_reversal",
    "loss_report",
]


class Metric(str, Enum):
    ZERO_ONE = "zero_one"
    KENDALL = "kendall"
    FOOTRULE = "footrule"


@dataclass(frozen=True)
class LossReport:
    zero_one: int
    kendall_tau: float
    spearman_footrule: float
    reversal_used: bool


def _check(pi1: Permutation, pi2: Permutation) -> int:
    if pi1.size != pi2.size:
        raise DimensionError(f"permutation sizes differ: {pi1.size} vs {pi2.size}")
    return pi1.size


def zero_one_loss(est: Permutation, truth: Permutation) -> int:
    _check(est, truth)
    return 0 if est == truth else 1


def count_inversions(seq) -> int:
    """Number of pairs ``i < j`` with ``seq[i] > seq[j]``, by merge sort."""
    a = list(seq)
    n = len(a)
    buf = [0] * n
    inversions = 0
    width = 1
    # bottom-up merge sort; each merge counts left elements exceeding a right one
    while width < n:
        for lo in range(0, n - width, 2 * width):
            mid = lo + width
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[i] <= a[j]:
                    buf[k] = a[i]
                    i += 1
                else:
                    buf[k] = a[j]
                    inversions += mid - i
                    j += 1
                k += 1
            while i < mid:
                buf[k] = a[i]
                i += 1
                k += 1
            while j < hi:
                buf[k] = a[j]
                j += 1
                k += 1
            a[lo:hi] = buf[lo:hi]
        width *= 2
    return inversions


def discordant_pairs(pi1: Permutation, pi2: Permutation) -> int:
    _check(pi1, pi2)
    # positions listed in pi1-order; discordances are inversions of pi2 along that list
    return count_inversions(pi2.mapping[inverse(pi1).mapping].tolist())


def _pair_count(p: int) -> int:
    if p < 2:
        raise DimensionError("Kendall's tau needs p >= 2")
    return p * (p - 1) // 2


def kendall_tau(pi1: Permutation, pi2: Permutation) -> float:
    """Normalized Kendall tau distance, discordant pairs over ``C(p, 2)``."""
    p = _check(pi1, pi2)
    return discordant_pairs(pi1, pi2) / _pair_count(p)


def kendall_tau_bruteforce(pi1: Permutation, pi2: Permutation) -> float:
    """O(p^2) enumeration of discordant pairs; the oracle for :func:`kendall_tau`."""
    p = _check(pi1, pi2)
    a, b = pi1.mapping, pi2.mapping
    da = a[:, None] - a[None, :]
    db = b[:, None] - b[None, :]
    upper = np.triu(np.ones((p, p), dtype=bool), k=1)
    discordant = ((da < 0) & (db > 0)) | ((da > 0) & (db < 0))
    return int(np.count_nonzero(discordant & upper)) / _pair_count(p)


def spearman_footrule(pi1: Permutation, pi2: Permutation) -> float:
    """Normalized footrule ``2 / (p (p-1)) * sum |pi1(i) - pi2(i)|``.

    Shares the Kendall normalizer, so values lie in ``[0, 2]``.
    """
    p = _check(pi1, pi2)
    return 2.0 * float(np.abs(pi1.mapping - pi2.mapping).sum()) / (p * (p - 1))


_METRICS = {
    Metric.ZERO_ONE: lambda e, t: float(zero_one_loss(e, t)),
    Metric.KENDALL: kendall_tau,
    Metric.FOOTRULE: spearman_footrule,
}


def _resolve_metric(metric) -> Metric:
    try:
        return Metric(metric)
    except ValueError:
        raise InputDomainError(f"unknown metric {metric!r}; expected one of "
                               f"{[m.value for m in Metric]}") from None


def loss_up_to_reversal(est: Permutation, truth: Permutation, metric="kendall") -> tuple[float, bool]:
    """Smaller of the losses against ``truth`` and ``reverse(truth)``.

    The flag is True only when the reversed truth is strictly better.
    """
    _check(est, truth)
    fn = _METRICS[_resolve_metric(metric)]
    direct = fn(est, truth)
    flipped = fn(est, reverse(truth))
    if flipped < direct:
        return flipped, True
    return direct, False


def loss_report(est: Permutation, truth: Permutation, up_to_reversal: bool = False) -> LossReport:
    """All three losses at once, optionally against the better orientation of ``truth``.

    The orientation is chosen by Kendall's tau and then used for every metric.
    """
    _check(est, truth)
    used = False
    if up_to_reversal:
        _, used = loss_up_to_reversal(est, truth, Metric.KENDALL)
    target = reverse(truth) if used else truth
    return LossReport(
        zero_one=zero_one_loss(est, target),
        kendall_tau=kendall_tau(est, target),
        spearman_footrule=spearman_footrule(est, target),
        reversal_used=used,
    )
