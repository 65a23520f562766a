import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lassokit.datagen import Stream
from lassokit.errors import ConvergenceError, DimensionError, SingularSupportError, SymmetryError
from lassokit.linalg import restricted_least_squares, restricted_solve, sigma_max

# dense eigensolver (eigvalsh) on X'X/10, X = Stream(1) normals reshaped 10x5
EIG_STREAM1 = 1.44237598233502
# 2x2 normal equations by Cramer's rule, X = Stream(2) 10x4, y = Stream(3), S = {1, 3}
RLS_STREAM23 = (0.3969719321394335, -0.3604051073863701)


def test_sigma_max_identity():
    assert sigma_max(np.eye(3)) == pytest.approx(1.0, abs=1e-12)


def test_sigma_max_diagonal():
    assert sigma_max(np.diag([1.0, 4.0])) == pytest.approx(4.0, rel=1e-10)


def test_sigma_max_matches_eigensolver():
    X = Stream(1).normal(50).reshape(10, 5)
    assert sigma_max(X.T @ X / 10) == pytest.approx(EIG_STREAM1, rel=1e-8)


def test_sigma_max_zero_matrix():
    assert sigma_max(np.zeros((3, 3))) == 0.0


def test_sigma_max_start_orthogonal_to_top_eigenvector():
    # ones is orthogonal to the top eigenvector (1, -1); power iteration
    # from ones alone would report 1
    A = np.array([[3.0, -2.0], [-2.0, 3.0]])
    assert sigma_max(A, seed=0) == pytest.approx(5.0, rel=1e-8)


def test_sigma_max_rejects_bad_input():
    with pytest.raises(DimensionError):
        sigma_max(np.ones((2, 3)))
    with pytest.raises(SymmetryError):
        sigma_max(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_sigma_max_iteration_cap():
    # close top eigenvalues make power iteration slow
    with pytest.raises(ConvergenceError):
        sigma_max(np.diag([1.0, 0.99, 0.5]), max_iter=20)


def test_sigma_max_deterministic():
    X = Stream(5).normal(60).reshape(12, 5)
    A = X.T @ X
    assert sigma_max(A) == sigma_max(A)
    assert sigma_max(A, seed=3) == sigma_max(A, seed=3)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), m=st.integers(1, 8))
def test_sigma_max_rayleigh_lower_bound(seed, m):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((m + 3, m))
    A = B.T @ B
    top = sigma_max(A)
    probes = rng.standard_normal((100, m))
    rq = np.einsum("ij,jk,ik->i", probes, A, probes) / np.einsum("ij,ij->i", probes, probes)
    assert np.all(rq <= top * (1 + 1e-8))
    assert top == pytest.approx(np.linalg.eigvalsh(A)[-1], rel=1e-6)


def test_rls_empty_support():
    X = Stream(0).normal(12).reshape(4, 3)
    assert np.array_equal(restricted_least_squares(X, np.ones(4), []), np.zeros(3))


def test_rls_orthonormal_single():
    Q, _ = np.linalg.qr(Stream(4).normal(30).reshape(10, 3))
    y = Stream(5).normal(10)
    beta = restricted_least_squares(Q, y, [0])
    assert beta[0] == pytest.approx(Q[:, 0] @ y, abs=1e-12)
    assert np.all(beta[1:] == 0)


def test_rls_matches_normal_equations():
    X = Stream(2).normal(40).reshape(10, 4)
    y = Stream(3).normal(10)
    beta = restricted_least_squares(X, y, [0, 2])
    np.testing.assert_allclose(beta[[0, 2]], RLS_STREAM23, atol=1e-10)
    assert beta[1] == 0 and beta[3] == 0


def test_rls_residual_orthogonal():
    X = Stream(6).normal(200).reshape(40, 5)
    y = Stream(7).normal(40)
    S = [0, 1, 4]
    beta = restricted_least_squares(X, y, S)
    assert np.max(np.abs(X[:, S].T @ (y - X @ beta))) <= 1e-9


def test_rls_singular_names_support():
    X = Stream(8).normal(30).reshape(10, 3)
    X[:, 2] = 2 * X[:, 0]
    with pytest.raises(SingularSupportError) as info:
        restricted_least_squares(X, np.ones(10), [0, 2])
    assert info.value.support == (0, 2)
    assert "[1, 3]" in str(info.value)


def test_rls_bad_support():
    with pytest.raises(DimensionError):
        restricted_least_squares(np.eye(3), np.ones(3), [5])


def test_restricted_solve_scatters():
    G = np.array([[2.0, 1.0, 0.0], [1.0, 3.0, 0.0], [0.0, 0.0, 9.0]])
    z = restricted_solve(G, np.array([3.0, 4.0, 99.0]), [1, 0])
    np.testing.assert_allclose(z, [1.0, 1.0, 0.0], atol=1e-14)
