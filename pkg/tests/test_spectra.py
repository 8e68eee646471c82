import numpy as np
import pytest

from monoperm import (ConvergenceError, DegenerateInputError, DimensionError, InputDomainError,
                      Permutation, apply_columns)
from monoperm.spectra import fix_sign, leading_eigenvector, projection_gram, row_center, top_svd
from oracles import gram_svd, jacobi_eigh


def test_row_center_examples():
    assert np.array_equal(row_center([[2.0, 2.0, 2.0], [5.0, 5.0, 5.0]]), np.zeros((2, 3)))
    assert np.allclose(row_center([1.0, 2.0, 3.0]), [[-1.0, 0.0, 1.0]])
    m = np.random.default_rng(0).normal(size=(4, 7))
    c = row_center(m)
    assert np.all(np.abs(c.sum(axis=1)) <= 7 * 1e-12)
    assert np.allclose(row_center(c), c, atol=1e-15)


def test_projection_gram_examples():
    assert np.array_equal(projection_gram([[1.0, 1.0], [4.0, 4.0]]), np.zeros((2, 2)))
    rng = np.random.default_rng(1)
    y = rng.normal(size=(5, 8))
    a = projection_gram(y)
    assert np.allclose(a, a.T, atol=1e-10)
    assert np.linalg.eigvalsh(a).min() > -1e-10
    pi = Permutation(rng.permutation(8))
    assert np.allclose(projection_gram(apply_columns(y, pi)), a, atol=1e-12)


def test_projection_gram_rank_one():
    a = np.array([1.0, 2.0, 2.0])
    eta = np.array([-3.0, -1.0, 1.0, 3.0])
    eta /= np.linalg.norm(eta)
    gram = projection_gram(np.outer(a, eta) + 5.0)
    assert np.allclose(gram, np.outer(a, a), atol=1e-12)
    res = leading_eigenvector(gram)
    assert np.allclose(res.vector, a / 3, atol=1e-9)
    assert res.value == pytest.approx(9.0)


def test_leading_eigenvector_examples():
    res = leading_eigenvector(np.diag([3.0, 1.0]))
    assert res.value == pytest.approx(3.0)
    assert np.allclose(res.vector, [1.0, 0.0], atol=1e-9)
    a = np.array([3.0, 4.0]) / 5
    res = leading_eigenvector(np.outer(a, a))
    assert res.value == pytest.approx(1.0)
    assert np.allclose(res.vector, [0.6, 0.8], atol=1e-12)


def test_leading_eigenvector_matches_jacobi_oracle():
    rng = np.random.default_rng(2)
    for _ in range(20):
        q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
        w = np.sort(rng.uniform(0, 1, 6))[::-1]
        w[0] += 1.0
        a = (q * w) @ q.T
        a = 0.5 * (a + a.T)
        vals, vecs = jacobi_eigh(a)
        res = leading_eigenvector(a)
        assert res.value == pytest.approx(vals[0], abs=1e-8)
        assert np.allclose(res.vector, fix_sign(vecs[:, 0]), atol=1e-8)
        assert abs(np.linalg.norm(res.vector) - 1) <= 1e-12
        assert res.residual <= 1e-10 * max(res.value, 1.0)


def test_leading_eigenvector_escapes_start_in_null_space():
    # the all-ones start is orthogonal to the dominant direction here
    a = np.outer([1.0, -1.0, 0.0], [1.0, -1.0, 0.0])
    res = leading_eigenvector(a)
    assert res.value == pytest.approx(2.0)
    assert np.allclose(np.abs(res.vector), [2**-0.5, 2**-0.5, 0], atol=1e-9)


def test_leading_eigenvector_sign_rule():
    res = leading_eigenvector(np.outer([1.0, -1.0], [1.0, -1.0]))
    assert res.vector[0] > 0
    res = leading_eigenvector(np.outer([-1.0, -3.0], [-1.0, -3.0]))
    assert res.vector.sum() > 0


def test_leading_eigenvector_errors():
    with pytest.raises(DegenerateInputError):
        leading_eigenvector(np.zeros((3, 3)))
    with pytest.raises(InputDomainError):
        leading_eigenvector(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DimensionError):
        leading_eigenvector(np.ones((2, 3)))
    with pytest.raises(InputDomainError):
        leading_eigenvector(np.eye(2), tol=0)
    # nearly tied eigenvalues cannot converge in two steps
    a = np.diag([1.0, 0.999999, 0.5])
    a[0, 1] = a[1, 0] = 1e-3
    with pytest.raises(ConvergenceError) as err:
        leading_eigenvector(a, max_iter=2)
    assert err.value.residual > 0


def test_top_svd_rank_one():
    a = np.array([1.0, 2.0, 3.0])
    eta = np.array([1.0, 1.0, 2.0, 4.0])
    res = top_svd(np.outer(a, eta), 1)
    assert res.singular_values[0] == pytest.approx(np.linalg.norm(a) * np.linalg.norm(eta))
    assert np.allclose(res.left_vectors[:, 0], a / np.linalg.norm(a), atol=1e-9)
    assert np.allclose(res.right_vectors[:, 0], eta / np.linalg.norm(eta), atol=1e-9)


def test_top_svd_orthogonal_columns():
    m = np.zeros((4, 3))
    m[0, 0], m[1, 1], m[2, 2] = 2.0, 5.0, 3.0
    res = top_svd(m, 3)
    assert np.allclose(res.singular_values, [5.0, 3.0, 2.0])


@pytest.mark.parametrize("shape", [(5, 9), (9, 5), (4, 4)])
def test_top_svd_full_reconstruction(shape):
    rng = np.random.default_rng(3)
    m = rng.normal(size=shape)
    k = min(shape)
    res = top_svd(m, k)
    recon = (res.left_vectors * res.singular_values) @ res.right_vectors.T
    assert np.allclose(recon, m, atol=1e-8)
    assert np.allclose(res.singular_values, gram_svd(m), atol=1e-8)
    assert np.all(np.diff(res.singular_values) <= 0)
    assert np.allclose(res.left_vectors.T @ res.left_vectors, np.eye(k), atol=1e-10)
    assert np.allclose(res.right_vectors.T @ res.right_vectors, np.eye(k), atol=1e-10)
    assert np.all(res.right_vectors.sum(axis=0) >= 0)


def test_top_svd_rank_deficient_row_centered():
    # row-centering leaves a null direction the ones-start falls into
    rng = np.random.default_rng(4)
    m = row_center(rng.normal(size=(6, 4)))
    res = top_svd(m, 4)
    assert res.singular_values[-1] == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(res.singular_values[:3], np.linalg.svd(m, compute_uv=False)[:3], atol=1e-8)
    assert np.allclose(res.right_vectors.T @ res.right_vectors, np.eye(4), atol=1e-10)


def test_top_svd_errors():
    with pytest.raises(DimensionError):
        top_svd(np.ones((2, 3)), 0)
    with pytest.raises(DimensionError):
        top_svd(np.ones((2, 3)), 3)


def test_eigen_and_svd_agree():
    rng = np.random.default_rng(5)
    for _ in range(50):
        y = rng.normal(size=(int(rng.integers(1, 8)), int(rng.integers(2, 10))))
        lam = leading_eigenvector(projection_gram(y)).value
        s = top_svd(row_center(y), 1).singular_values[0]
        assert lam == pytest.approx(s**2, rel=1e-8)
