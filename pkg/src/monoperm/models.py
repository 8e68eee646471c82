"""Signal generators, noise, signal-strength quantities and lower-bound instances.

Random streams
--------------
Every generator takes an explicit seed and builds its own
``numpy.random.default_rng(seed)`` (PCG64 bit generator seeded through
``SeedSequence``).  Gaussian noise comes from ``Generator.standard_normal``,
NumPy's ziggurat sampler, scaled by ``sqrt(sigma2)``.  Same seed, same NumPy
release: identical matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import Permutation, as_data_matrix
from .errors import DimensionError, InputDomainError
from .spectra import DEFAULT_TOL, row_center, top_svd

__all__ = [
    "Regime",
    "LinearGrowthSpec",
    "RegimeSpec",
    "RegimeDraw",
    "SignalQuantities",
    "generate_linear",
    "generate_regime",
    "add_noise",
    "signal_quantities_linear",
    "signal_quantities_general",
    "risk_bound",
    "hard_instance",
    "is_monotone_matrix",
]


class Regime(str, Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"


@dataclass(frozen=True)
class LinearGrowthSpec:
    """Rows ``theta_ij = a_i * eta_j + b_i`` with ``a, b >= 0`` and nondecreasing ``eta >= 0``."""

    a: np.ndarray
    b: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).ravel()
        b = np.asarray(self.b, dtype=float).ravel()
        eta = np.asarray(self.eta, dtype=float).ravel()
        if a.size < 1 or a.size != b.size:
            raise DimensionError(f"a and b must have equal nonzero length ({a.size} vs {b.size})")
        if eta.size < 2:
            raise DimensionError("eta needs at least two entries")
        for name, v in (("a", a), ("b", b), ("eta", eta)):
            if not np.all(np.isfinite(v)):
                raise InputDomainError(f"{name} has non-finite entries")
            if np.any(v < 0):
                raise InputDomainError(f"{name} must be nonnegative")
        if np.any(np.diff(eta) < 0):
            raise InputDomainError("eta must be nondecreasing")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "eta", eta)

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def p(self) -> int:
        return self.eta.size


@dataclass(frozen=True)
class RegimeSpec:
    """One simulation regime.

    ``intercept_in_log`` selects the S1/S3 row form: ``log(1 + j a_i + b_i)``
    when True, ``log(1 + j a_i) + b_i`` when False.  It has no effect on the
    linear regimes.
    """

    regime: Regime
    alpha: float
    n: int
    p: int
    sigma2: float
    intercept_in_log: bool = True

    def __post_init__(self):
        try:
            object.__setattr__(self, "regime", Regime(self.regime))
        except ValueError:
            raise InputDomainError(f"unknown regime {self.regime!r}") from None
        if not self.alpha > 0 or not self.sigma2 > 0:
            raise InputDomainError("alpha and sigma2 must be positive")
        if int(self.n) != self.n or int(self.p) != self.p:
            raise InputDomainError("n and p must be integers")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", int(self.p))
        if self.p < 2:
            raise InputDomainError("p must be at least 2")
        if self.regime in (Regime.S1, Regime.S2):
            if self.n < 2 or self.n % 2:
                raise InputDomainError(f"{self.regime.value} needs an even n >= 2")
        elif self.n < 4:
            raise InputDomainError(f"{self.regime.value} needs n >= 4")


@dataclass(frozen=True)
class RegimeDraw:
    """Per-row parameters drawn for one regime instance."""

    slopes: np.ndarray
    intercepts: np.ndarray
    informative: np.ndarray


@dataclass(frozen=True)
class SignalQuantities:
    gamma: float
    lam: float
    xi: float
    sigma: float
    extras: dict = field(default_factory=dict, compare=False)


def is_monotone_matrix(theta, atol: float = 0.0) -> bool:
    """True when every row is nonnegative and nondecreasing."""
    theta = np.asarray(theta, dtype=float)
    return bool(np.all(theta >= -atol) and np.all(np.diff(theta, axis=1) >= -atol))


def generate_linear(spec: LinearGrowthSpec) -> np.ndarray:
    return np.outer(spec.a, spec.eta) + spec.b[:, None]


# slope law for the weakly informative rows
_WEAK_SLOPE = {
    Regime.S1: lambda alpha: 0.01,
    Regime.S2: lambda alpha: alpha / 10,
    Regime.S3: lambda alpha: 0.01,
    Regime.S4: lambda alpha: alpha / 10,
}


def generate_regime(spec: RegimeSpec, rng_seed) -> tuple[np.ndarray, RegimeDraw]:
    """Draw a signal matrix from regime S1-S4.

    S1/S3 rows are ``log(1 + j*alpha_i + beta_i)`` (or ``log(1 + j*alpha_i) + beta_i``
    when ``spec.intercept_in_log`` is False), S2/S4 rows are
    ``j*alpha_i + beta_i`` with ``j = 1..p``.  Strong slopes follow
    ``Unif(alpha/2, alpha)``: on the first ``n/2`` rows for S1/S2 and on the
    first three rows for S3/S4.  The remaining slopes are ``Unif(0, 0.01)``
    (S1, S3) or ``Unif(0, alpha/10)`` (S2, S4); intercepts are ``Unif(1, 3)``.
    """
    rng = np.random.default_rng(rng_seed)
    n, p, alpha = spec.n, spec.p, spec.alpha
    n_strong = n // 2 if spec.regime in (Regime.S1, Regime.S2) else 3
    strong = rng.uniform(alpha / 2, alpha, size=n_strong)
    weak = rng.uniform(0.0, _WEAK_SLOPE[spec.regime](alpha), size=n - n_strong)
    slopes = np.concatenate([strong, weak])
    intercepts = rng.uniform(1.0, 3.0, size=n)
    j = np.arange(1, p + 1, dtype=float)
    growth = np.outer(slopes, j)
    if spec.regime in (Regime.S2, Regime.S4):
        theta = growth + intercepts[:, None]
    elif spec.intercept_in_log:
        theta = np.log1p(growth + intercepts[:, None])
    else:
        theta = np.log1p(growth) + intercepts[:, None]
    informative = np.zeros(n, dtype=bool)
    informative[:n_strong] = True
    return theta, RegimeDraw(slopes=slopes, intercepts=intercepts, informative=informative)


def add_noise(theta, sigma2: float, rng_seed) -> np.ndarray:
    """``theta + Z`` with i.i.d. ``N(0, sigma2)`` entries."""
    theta = np.asarray(theta, dtype=float)
    if not sigma2 >= 0:
        raise InputDomainError(f"sigma2 must be nonnegative, got {sigma2}")
    if sigma2 == 0:
        return theta.copy()
    rng = np.random.default_rng(rng_seed)
    return theta + math.sqrt(sigma2) * rng.standard_normal(theta.shape)


def _min_pairwise_gap(x: np.ndarray) -> float:
    return float(np.diff(np.sort(x)).min())


def _max_consecutive_column_gap(theta_c: np.ndarray) -> float:
    return float(np.linalg.norm(np.diff(theta_c, axis=1), axis=0).max())


def signal_quantities_linear(spec: LinearGrowthSpec, sigma: float) -> SignalQuantities:
    norm_a = float(np.linalg.norm(spec.a))
    eta = spec.eta
    gamma = norm_a * _min_pairwise_gap(eta)
    lam = norm_a**2 * float(np.sum((eta - eta.mean()) ** 2))
    xi = _max_consecutive_column_gap(row_center(generate_linear(spec)))
    return SignalQuantities(gamma=gamma, lam=lam, xi=xi, sigma=sigma)


def signal_quantities_general(theta, sigma: float, tol: float = DEFAULT_TOL) -> SignalQuantities:
    """Signal gap, maximal consecutive gap and spectral gap of the row-centered matrix."""
    theta_c = row_center(as_data_matrix(theta))
    n, p = theta_c.shape
    k = min(2, n, p)
    svd = top_svd(theta_c, k, tol=tol)
    lam1 = float(svd.singular_values[0])
    lam2 = float(svd.singular_values[1]) if k > 1 else 0.0
    v1 = svd.right_vectors[:, 0]
    return SignalQuantities(
        gamma=lam1 * _min_pairwise_gap(v1),
        lam=lam1**2 - lam2**2,
        xi=_max_consecutive_column_gap(theta_c),
        sigma=sigma,
        extras={"lambda1": lam1, "lambda2": lam2, "v1": v1, "u1": svd.left_vectors[:, 0]},
    )


def risk_bound(gamma: float, sigma: float, p: int, c: float = 1.0) -> float:
    """Three-regime upper bound on the expected Kendall tau risk, constants set to 1.

    With ``r = gamma / sigma``::

        p^-(c+2)                                   if r >= sqrt(2 (c+1) log p)
        max(exp(-r^2/2) / (p r), p^-(c+2))         if 1 <= r < sqrt(2 (c+1) log p)
        min(1 / (p r), 1)                          if r < 1

    The floor in the middle branch keeps the curve nonincreasing across branches.
    """
    if not sigma > 0:
        raise InputDomainError("sigma must be positive")
    if p < 2:
        raise InputDomainError("p must be at least 2")
    if not c > 0:
        raise InputDomainError("c must be positive")
    if gamma < 0:
        raise InputDomainError("gamma must be nonnegative")
    r = gamma / sigma
    floor = float(p) ** -(c + 2)
    if r >= math.sqrt(2 * (c + 1) * math.log(p)):
        return floor
    if r >= 1:
        return max(math.exp(-r * r / 2) / (p * r), floor)
    if r == 0:
        return 1.0
    return min(1.0 / (p * r), 1.0)


def hard_instance(p: int, n: int, sigma: float, kind: str = "exact_lb", which: int = 0,
                  t: float | None = None, gap_scale: float = 1.0) -> tuple[np.ndarray, Permutation]:
    """Lower-bound constructions with ``theta = a eta^T``.

    ``exact_lb``: ``a = 1``, ``eta = (0, d, ..., (p-1) d)`` with
    ``d = gap_scale * (sigma/4) sqrt(log p / n)``, so the signal gap is
    ``gap_scale * (sigma/4) sqrt(log p)``.  ``which = 0`` pairs it with the
    identity, ``which = k`` with the swap of positions ``k-1`` and ``k``.

    ``partial_lb``: ``a = 1/sqrt(320 n)``, ``eta = (t, 2t, ..., pt)``, identity.
    """
    if p < 2 or n < 1:
        raise DimensionError("need p >= 2 and n >= 1")
    if not sigma > 0:
        raise InputDomainError("sigma must be positive")
    if kind == "exact_lb":
        if not 0 <= which < p:
            raise InputDomainError(f"which must lie in [0, {p - 1}], got {which}")
        delta = gap_scale * (sigma / 4) * math.sqrt(math.log(p) / n)
        a = np.ones(n)
        eta = delta * np.arange(p, dtype=float)
        perm = np.arange(p)
        if which > 0:
            perm[which - 1], perm[which] = which, which - 1
        return np.outer(a, eta), Permutation(perm)
    if kind == "partial_lb":
        if t is None or not t / sigma >= 2:
            raise InputDomainError("partial_lb needs t / sigma >= 2")
        a = np.full(n, 1 / math.sqrt(320 * n))
        eta = gap_scale * t * np.arange(1, p + 1, dtype=float)
        return np.outer(a, eta), Permutation.identity(p)
    raise InputDomainError(f"unknown hard-instance kind {kind!r}")
