"""Dense linear algebra used by the solvers.

Matrices and vectors are plain ``numpy.ndarray`` objects (C order,
float64).  Only two non-trivial operations live here: the largest
eigenvalue of a symmetric PSD matrix by power iteration, and least
squares restricted to a support set.
"""

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DimensionError, SingularSupportError, SymmetryError

__all__ = [
    "as_matrix",
    "as_vector",
    "sigma_max",
    "restricted_solve",
    "restricted_least_squares",
]

# Cholesky pivots below this fraction of the largest diagonal entry are
# treated as rank deficiency.
_RANK_RTOL = 1e-12


def as_matrix(A, name="matrix"):
    A = np.ascontiguousarray(A, dtype=float)
    if A.ndim != 2:
        raise DimensionError("%s must be 2-D, got shape %s" % (name, A.shape))
    if not np.all(np.isfinite(A)):
        raise ValueError("%s has non-finite entries" % name)
    return A


def as_vector(x, length=None, name="vector"):
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError("%s must be 1-D, got shape %s" % (name, x.shape))
    if length is not None and x.shape[0] != length:
        raise DimensionError("%s has length %d, expected %d" % (name, x.shape[0], length))
    if not np.all(np.isfinite(x)):
        raise ValueError("%s has non-finite entries" % name)
    return x


def sigma_max(A, tol=1e-10, max_iter=10_000, seed=None):
    """Largest eigenvalue of a symmetric positive semidefinite matrix.

    Power iteration from the normalised all-ones vector (or a seeded
    Gaussian vector when ``seed`` is given).  Stops once the Rayleigh
    quotient changes by less than ``tol`` relative to its magnitude.

    Parameters
    ----------
    A : (m, m) array_like
        Symmetric PSD matrix (symmetry checked to 1e-12).
    tol : float
        Relative tolerance on successive Rayleigh quotients.
    max_iter : int
        Iteration cap; exceeding it raises ``ConvergenceError``.
    seed : int, optional
        Use a seeded random start instead of the all-ones vector.

    Returns
    -------
    float
    """
    A = as_matrix(A, "A")
    m, k = A.shape
    if m != k:
        raise DimensionError("sigma_max needs a square matrix, got %dx%d" % (m, k))
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * scale):
        raise SymmetryError("sigma_max needs a symmetric matrix")
    if m == 0:
        return 0.0

    if seed is None:
        v = np.ones(m)
    else:
        v = np.random.default_rng(seed).standard_normal(m)
    v /= np.linalg.norm(v)

    rho = 0.0
    for _ in range(max_iter):
        w = A @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # v is in the null space; for PSD A started from ones this
            # means A = 0 or ones is orthogonal to every eigenvector with
            # nonzero eigenvalue.
            if not np.any(A):
                return 0.0
            v = np.random.default_rng(0).standard_normal(m)
            v /= np.linalg.norm(v)
            continue
        rho_new = float(v @ w)
        v = w / nw
        if abs(rho_new - rho) <= tol * abs(rho_new):
            return float(v @ (A @ v))
        rho = rho_new
    raise ConvergenceError("power iteration did not converge in %d iterations" % max_iter)


def _cholesky(M, support):
    try:
        c, lower = scipy.linalg.cho_factor(M, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        raise SingularSupportError(support) from None
    diag = np.abs(np.diag(c)) ** 2
    if diag.size and diag.min() <= _RANK_RTOL * max(diag.max(), np.finfo(float).tiny):
        raise SingularSupportError(support)
    return c, lower


def restricted_solve(gram, rhs, support):
    """Solve ``gram[S, S] z = rhs[S]`` and scatter ``z`` into a length-p vector.

    This is the workhorse behind restricted least squares and the exact
    Lasso polish on a known support (where ``rhs = X'y - n*lam*signs``).
    """
    gram = np.asarray(gram, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    S = np.asarray(sorted(int(j) for j in support), dtype=int)
    out = np.zeros(gram.shape[0])
    if S.size == 0:
        return out
    c = _cholesky(gram[np.ix_(S, S)], S)
    out[S] = scipy.linalg.cho_solve(c, rhs[S], check_finite=False)
    return out


def restricted_least_squares(X, y, support):
    """Least squares using only the columns in ``support``.

    Returns beta with ``beta[S] = (X_S'X_S)^{-1} X_S'y`` and zeros
    elsewhere.  Rank deficiency of ``X_S`` raises
    ``SingularSupportError``; no ridge fallback is attempted.
    """
    X = as_matrix(X, "X")
    n, p = X.shape
    y = as_vector(y, n, "y")
    S = sorted(int(j) for j in support)
    if any(j < 0 or j >= p for j in S) or len(set(S)) != len(S):
        raise DimensionError("support %s is not a subset of 0..%d" % (S, p - 1))
    beta = np.zeros(p)
    if not S:
        return beta
    XS = X[:, S]
    c = _cholesky(XS.T @ XS, S)
    beta[S] = scipy.linalg.cho_solve(c, XS.T @ y, check_finite=False)
    return beta
