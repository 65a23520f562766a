from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from lassokit.datagen import GenSpec, gen_linear
from lassokit.problem import LassoProblem
from lassokit.verify import oracle_solve

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS_SEEDS = range(20)


@lru_cache(maxsize=None)
def corpus_problem(seed, n=50, p=20, ratio=0.1):
    """Standard corpus instance: s=5, sigma=0.5, lam = ratio * lambda_max."""
    X, y, _ = gen_linear(GenSpec(n, p, sparsity=5, sigma=0.5, seed=seed))
    base = LassoProblem(X, y, 0.0)
    return base.with_lambda(ratio * base.lambda_max)


@lru_cache(maxsize=None)
def corpus_oracle(seed):
    return oracle_solve(corpus_problem(seed))


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def small_problem():
    return corpus_problem(0)


def quadratic(seed, d=8, cond=50.0):
    """Convex quadratic 0.5 x'Ax - b'x with known minimiser and L = max eig."""
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eig = np.geomspace(1.0, cond, d)
    A = (Q * eig) @ Q.T
    A = (A + A.T) / 2
    b = rng.standard_normal(d)
    x_star = np.linalg.solve(A, b)
    f = lambda x: 0.5 * x @ A @ x - b @ x
    grad = lambda x: A @ x - b
    return f, grad, x_star, f(x_star), float(eig[-1])
