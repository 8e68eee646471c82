"""Row centering, the projection Gram matrix and power-iteration eigen/SVD kernels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_data_matrix
from .errors import ConvergenceError, DegenerateInputError, DimensionError, InputDomainError

__all__ = [
    "EigenResult",
    "SvdTriplets",
    "row_center",
    "projection_gram",
    "leading_eigenvector",
    "top_svd",
    "fix_sign",
    "DEFAULT_TOL",
    "DEFAULT_MAX_ITER",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000

# fixed fallback start vectors, used when the all-ones start is useless
_ALT_SEED = 0x5EED_0F_A17
_N_ALT_STARTS = 3


@dataclass(frozen=True)
class EigenResult:
    value: float
    vector: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class SvdTriplets:
    k: int
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray


def fix_sign(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its component sum is nonnegative.

    When the sum vanishes (up to rounding) the first nonzero component is made positive.
    """
    s = v.sum()
    scale = 1e-12 * np.sqrt(v.size) * max(np.abs(v).max(initial=0.0), 1e-300)
    if abs(s) > scale:
        return v if s > 0 else -v
    nz = np.flatnonzero(np.abs(v) > 1e-12 * np.abs(v).max(initial=0.0))
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def row_center(m) -> np.ndarray:
    """Subtract each row's mean, i.e. right-multiply by ``I - ee^T / p``."""
    arr = as_data_matrix(m, min_p=1)
    return arr - arr.mean(axis=1, keepdims=True)


def projection_gram(y) -> np.ndarray:
    """``A = T T^T`` with ``T = row_center(y)``; maximizing ``w^T A w`` spreads ``w^T y``."""
    t = row_center(y)
    a = t @ t.T
    return 0.5 * (a + a.T)


def _start_vectors(n: int):
    yield np.full(n, 1.0 / np.sqrt(n))
    rng = np.random.default_rng(_ALT_SEED)
    for _ in range(_N_ALT_STARTS):
        v = rng.standard_normal(n)
        yield v / np.linalg.norm(v)


def _orthogonalize(v: np.ndarray, basis) -> np.ndarray:
    for b in basis:
        v = v - (b @ v) * b
    return v


def _power_iterate(a: np.ndarray, v: np.ndarray, tol: float, max_iter: int, basis=()):
    """Run power iteration from ``v``.

    Returns ``(value, vector, iterations, residual, status)`` where status is
    ``"converged"``, ``"collapsed"`` (``A v`` vanished) or ``"stalled"``.
    """
    scale = np.linalg.norm(a)
    v = _orthogonalize(v, basis)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return 0.0, v, 0, 0.0, "collapsed"
    v = v / nv
    residual = np.inf
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = _orthogonalize(a @ v, basis)
        nw = np.linalg.norm(w)
        lam = float(v @ w)
        residual = float(np.linalg.norm(w - lam * v))
        if nw <= 1e-12 * scale:
            return lam, v, it, residual, "collapsed"
        if residual <= tol * max(lam, 1.0):
            return lam, v, it, residual, "converged"
        v = w / nw
    return lam, v, max_iter, residual, "stalled"


def leading_eigenvector(a, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> EigenResult:
    """Dominant eigenpair of a symmetric PSD matrix by normalized power iteration.

    Starts from the all-ones direction; a few fixed alternate starts are tried
    if that start collapses, stalls, or lands on a non-dominant eigenvector
    (detected by a Rayleigh quotient below ``trace(A)/n``).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputDomainError("matrix contains non-finite values")
    if tol <= 0:
        raise InputDomainError("tol must be positive")
    if not np.allclose(a, a.T, rtol=1e-10, atol=1e-12 * max(np.abs(a).max(), 1.0)):
        raise InputDomainError("matrix is not symmetric")
    n = a.shape[0]
    if not np.any(a):
        raise DegenerateInputError("zero matrix has no dominant eigenvector")
    floor = np.trace(a) / n

    last = None
    for start in _start_vectors(n):
        lam, v, it, res, status = _power_iterate(a, start, tol, max_iter)
        last = (lam, res, it)
        if status == "converged" and lam >= floor * (1 - 1e-9):
            return EigenResult(value=lam, vector=fix_sign(v), iterations=it, residual=res)
    lam, res, it = last
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations (residual {res:.3e})",
        residual=res, iterations=it,
    )


def _complete_basis(basis, dim: int) -> np.ndarray:
    """A unit vector orthogonal to ``basis`` (Gram-Schmidt over the canonical basis)."""
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        for _ in range(2):
            e = _orthogonalize(e, basis)
        ne = np.linalg.norm(e)
        if ne > 1e-8:
            return e / ne
    raise DimensionError("cannot extend a full basis")


def _ritz_refine(m, basis, on_right: bool, negligible: float):
    """Rotate ``basis`` to the singular directions of ``m`` restricted to its span.

    The small projected Gram is diagonalized directly, so the vectors derived
    on the other side come out orthonormal to rounding even when the
    power-iteration basis is only accurate to the iteration tolerance.
    """
    proj = m @ basis if on_right else m.T @ basis
    w, q = np.linalg.eigh(proj.T @ proj)
    q = q[:, ::-1]
    basis = basis @ q
    proj = proj @ q
    values = np.sqrt(np.clip(w[::-1], 0.0, None))
    other_dim = m.shape[0] if on_right else m.shape[1]
    derived = []
    for i, s in enumerate(values):
        if s > negligible:
            d = _orthogonalize(proj[:, i] / s, derived)
            derived.append(d / np.linalg.norm(d))
        else:
            values[i] = 0.0
            derived.append(_complete_basis(derived, other_dim))
    return basis, np.column_stack(derived), values


def top_svd(m, k: int = 1, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SvdTriplets:
    """Top-``k`` singular triplets by power iteration on the smaller Gram matrix.

    Each found direction is deflated from ``m`` and later iterates are kept
    orthogonal to the directions already found.  A final Rayleigh-Ritz step
    on the found subspace yields the singular values and the other-side
    vectors.  Right vectors are signed to have a nonnegative component sum.
    """
    m = as_data_matrix(m, min_p=1)
    n, p = m.shape
    if not 1 <= k <= min(n, p):
        raise DimensionError(f"k must lie in [1, {min(n, p)}], got {k}")
    if tol <= 0:
        raise InputDomainError("tol must be positive")
    on_right = p <= n
    dim = p if on_right else n
    residual_matrix = m.copy()
    found = []  # vectors in the Gram's own space
    negligible = 1e-12 * max(np.linalg.norm(m), 1e-300)
    for _ in range(k):
        r = residual_matrix
        gram = r.T @ r if on_right else r @ r.T
        gram = 0.5 * (gram + gram.T)
        x = None
        if np.linalg.norm(gram) > negligible**2:
            failure = None
            floor = np.trace(gram) / (dim - len(found))
            for start in _start_vectors(dim):
                lam, v, it, res, status = _power_iterate(gram, start, tol, max_iter, basis=found)
                if status == "converged" and lam >= floor * (1 - 1e-9):
                    x = v
                    break
                if status != "collapsed":
                    failure = (res, it)
            # every start collapsing means the remaining spectrum is numerically zero
            if x is None and failure is not None:
                raise ConvergenceError(
                    f"top_svd: power iteration did not converge (residual {failure[0]:.3e})",
                    residual=failure[0], iterations=failure[1],
                )
        if x is None:
            x = _complete_basis(found, dim)
        x = _orthogonalize(x, found)
        x /= np.linalg.norm(x)
        found.append(x)
        y = m @ x if on_right else m.T @ x
        residual_matrix = residual_matrix - np.outer(y, x) if on_right else residual_matrix - np.outer(x, y)

    basis, derived, values = _ritz_refine(m, np.column_stack(found), on_right, negligible)
    lefts, rights = (derived, basis) if on_right else (basis, derived)
    for i in range(k):
        if rights[:, i].sum() != fix_sign(rights[:, i]).sum():
            rights[:, i], lefts[:, i] = -rights[:, i], -lefts[:, i]
    order = np.argsort(-np.asarray(values), kind="stable")
    return SvdTriplets(
        k=k,
        singular_values=np.asarray(values)[order],
        left_vectors=lefts[:, order],
        right_vectors=rights[:, order],
    )
