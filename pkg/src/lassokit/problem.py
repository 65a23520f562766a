"""The Lasso problem, its smooth/nonsmooth pieces and the softplus surrogate.

Objective minimised throughout the package::

    F(beta) = ||y - X beta||^2 / (2n) + lam * ||beta||_1

The 1/n factor is kept everywhere, including the optimality conditions,
so ``lambda_max = ||X'y||_inf / n``.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix, as_vector, sigma_max

__all__ = [
    "LassoProblem",
    "SurrogateParams",
    "objective",
    "grad_smooth",
    "soft_threshold",
    "kkt_residual",
    "surrogate_phi",
    "surrogate_phi_prime",
    "surrogate_objective",
    "surrogate_grad",
    "surrogate_gap_bound",
]

_LOG2 = float(np.log(2.0))


@dataclass(frozen=True, eq=False)
class LassoProblem:
    """Data ``(X, y)`` and penalty ``lam`` with cached Gram quantities.

    ``gram = X'X``, ``xty = X'y`` and ``L`` (largest eigenvalue of
    ``X'X/n``) are computed once at construction; solvers only touch these
    inside their loops.
    """

    X: np.ndarray
    y: np.ndarray
    lam: float
    gram: np.ndarray = field(init=False, repr=False)
    xty: np.ndarray = field(init=False, repr=False)
    yty: float = field(init=False, repr=False)
    L: float = field(init=False)

    def __post_init__(self):
        X = as_matrix(self.X, "X")
        y = as_vector(self.y, X.shape[0], "y")
        lam = float(self.lam)
        if not lam >= 0.0 or not np.isfinite(lam):
            raise ValueError("lam must be a finite nonnegative number, got %r" % self.lam)
        X.setflags(write=False)
        y.setflags(write=False)
        gram = X.T @ X
        # exact symmetry for the eigen solver
        gram = 0.5 * (gram + gram.T)
        gram.setflags(write=False)
        xty = X.T @ y
        xty.setflags(write=False)
        n = X.shape[0]
        set_ = object.__setattr__
        set_(self, "X", X)
        set_(self, "y", y)
        set_(self, "lam", lam)
        set_(self, "gram", gram)
        set_(self, "xty", xty)
        set_(self, "yty", float(y @ y))
        set_(self, "L", sigma_max(gram / n) if n else 0.0)

    @property
    def n(self):
        return self.y.shape[0]

    @property
    def p(self):
        return self.xty.shape[0]

    @property
    def lambda_max(self):
        return float(np.max(np.abs(self.xty))) / self.n if self.p else 0.0

    def with_lambda(self, lam):
        """Same data, different penalty (reuses nothing; cheap at desk scale)."""
        return LassoProblem(self.X, self.y, lam)

    def check_beta(self, beta):
        return as_vector(beta, self.p, "beta")

    # Gram-only evaluations used inside solver loops.
    def smooth_from_gram(self, beta, gram_beta):
        """``||y - X beta||^2/(2n)`` from a precomputed ``X'X beta``."""
        return (self.yty - 2.0 * float(beta @ self.xty) + float(beta @ gram_beta)) / (2.0 * self.n)

    def objective_from_gram(self, beta, gram_beta):
        return self.smooth_from_gram(beta, gram_beta) + self.lam * float(np.sum(np.abs(beta)))

    def kkt_from_gram(self, beta, gram_beta):
        return _kkt(beta, (self.xty - gram_beta) / self.n, self.lam)


@dataclass(frozen=True)
class SurrogateParams:
    alpha: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError("alpha must be a positive finite number, got %r" % self.alpha)


def _alpha(params):
    if isinstance(params, SurrogateParams):
        return params.alpha
    return SurrogateParams(float(params)).alpha


def objective(problem, beta):
    """``||y - X beta||^2/(2n) + lam ||beta||_1`` evaluated from the raw data."""
    beta = problem.check_beta(beta)
    r = problem.y - problem.X @ beta
    return float(r @ r) / (2.0 * problem.n) + problem.lam * float(np.sum(np.abs(beta)))


def grad_smooth(problem, beta):
    """Gradient of the quadratic part: ``(X'X beta - X'y) / n``."""
    beta = problem.check_beta(beta)
    return (problem.gram @ beta - problem.xty) / problem.n


def soft_threshold(x, alpha):
    """Soft-thresholding ``S(x, alpha)``; elementwise on arrays.

    ``x - alpha`` if ``x >= alpha``, ``x + alpha`` if ``x <= -alpha``,
    zero otherwise.
    """
    if np.any(np.asarray(alpha) < 0):
        raise ValueError("soft_threshold needs alpha >= 0, got %r" % (alpha,))
    x_arr = np.asarray(x, dtype=float)
    out = np.where(x_arr >= alpha, x_arr - alpha, np.where(x_arr <= -alpha, x_arr + alpha, 0.0))
    if out.ndim == 0:
        return float(out)
    return out


def _kkt(beta, corr, lam):
    on = beta != 0
    res = np.where(on, np.abs(corr - lam * np.sign(beta)), np.maximum(0.0, np.abs(corr) - lam))
    return float(res.max()) if res.size else 0.0


def kkt_residual(problem, beta):
    """Distance of ``X'(y - X beta)/n`` from ``lam * d|beta|``, max over coordinates.

    Zero exactly at a minimiser of the Lasso objective.
    """
    beta = problem.check_beta(beta)
    corr = problem.X.T @ (problem.y - problem.X @ beta) / problem.n
    return _kkt(beta, corr, problem.lam)


def surrogate_phi(x, params):
    """Softplus approximation of ``|x|``.

    ``(log(1 + exp(-a x)) + log(1 + exp(a x))) / a`` evaluated as
    ``|x| + (2/a) log1p(exp(-a |x|))`` so that large ``|a x|`` does not
    overflow.
    """
    a = _alpha(params)
    ax = np.abs(np.asarray(x, dtype=float))
    out = ax + (2.0 / a) * np.log1p(np.exp(-a * ax))
    return float(out) if out.ndim == 0 else out


def surrogate_phi_prime(x, params):
    """Derivative of ``surrogate_phi``: ``tanh(a x / 2)``."""
    a = _alpha(params)
    out = np.tanh(0.5 * a * np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def surrogate_objective(problem, beta, params):
    beta = problem.check_beta(beta)
    r = problem.y - problem.X @ beta
    return float(r @ r) / (2.0 * problem.n) + problem.lam * float(np.sum(surrogate_phi(beta, params)))


def surrogate_grad(problem, beta, params):
    """``(X'X beta - X'y)/n + lam * tanh(alpha beta / 2)``."""
    return grad_smooth(problem, beta) + problem.lam * surrogate_phi_prime(beta, params)


def surrogate_gap_bound(p, lam, params):
    """Uniform bound on ``F_alpha - F``: ``2 p lam log 2 / alpha``."""
    return 2.0 * p * lam * _LOG2 / _alpha(params)
