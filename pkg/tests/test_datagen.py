import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lassokit.datagen import GenSpec, Stream, gen_linear, standardize_columns
from lassokit.problem import LassoProblem
from lassokit.verify import oracle_solve


def reference_stream(n, p, s, lo, hi, seed):
    """Scalar re-implementation of the documented draw order."""
    g = np.random.Generator(np.random.PCG64(seed))
    u = lambda: float(g.random())

    def normals(m):
        out = []
        while len(out) < m:
            u1, u2 = u(), u()
            r = math.sqrt(-2.0 * math.log1p(-u1))
            out += [r * math.cos(2 * math.pi * u2), r * math.sin(2 * math.pi * u2)]
        return out[:m]

    flat = normals(n * p)
    idx = list(range(p))
    for i in range(s):
        j = i + min(int(u() * (p - i)), p - i - 1)
        idx[i], idx[j] = idx[j], idx[i]
    mags = [lo + (hi - lo) * u() for _ in range(s)]
    signs = [-1.0 if u() < 0.5 else 1.0 for _ in range(s)]
    beta = [0.0] * p
    for j, m, sg in zip(idx[:s], mags, signs):
        beta[j] = sg * m
    return np.array(flat).reshape(n, p), np.array(beta), np.array(normals(n))


@pytest.mark.parametrize("seed", [0, 7, 123])
def test_matches_reference_stream(seed):
    X, y, beta = gen_linear(GenSpec(30, 12, sparsity=4, sigma=0.3, seed=seed))
    Xr, br, wr = reference_stream(30, 12, 4, 1.0, 3.0, seed)
    assert np.array_equal(X, Xr)
    assert np.array_equal(beta, br)
    assert np.array_equal(y, X @ beta + 0.3 * wr)


def test_noiseless():
    X, y, beta = gen_linear(GenSpec(40, 10, sigma=0.0, seed=3))
    assert np.linalg.norm(y - X @ beta) == 0.0


def test_same_seed_bitwise():
    a = gen_linear(GenSpec(25, 8, seed=11))
    b = gen_linear(GenSpec(25, 8, seed=11))
    for u, v in zip(a, b):
        assert np.array_equal(u, v)
    c = gen_linear(GenSpec(25, 8, seed=12))
    assert not np.array_equal(a[0], c[0])


def test_sigma_does_not_shift_other_draws():
    X0, _, b0 = gen_linear(GenSpec(20, 6, sigma=0.0, seed=5))
    X1, _, b1 = gen_linear(GenSpec(20, 6, sigma=2.0, seed=5))
    assert np.array_equal(X0, X1) and np.array_equal(b0, b1)


def test_null_model():
    X, y, beta = gen_linear(GenSpec(30, 6, sparsity=0, seed=2))
    assert not np.any(beta)
    base = LassoProblem(X, y, 0.0)
    assert not np.any(oracle_solve(base.with_lambda(base.lambda_max)))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 30), p=st.integers(1, 15), data=st.data())
def test_exact_sparsity_and_magnitudes(n, p, data):
    s = data.draw(st.integers(0, p))
    seed = data.draw(st.integers(0, 2**32))
    _, _, beta = gen_linear(GenSpec(n, p, sparsity=s, seed=seed, magnitude=(0.5, 2.0)))
    nz = beta[beta != 0]
    assert nz.size == s
    assert np.all((np.abs(nz) >= 0.5) & (np.abs(nz) < 2.0))


def test_standardize_unit_norm():
    X, _, _ = gen_linear(GenSpec(40, 7, seed=1, standardize=True))
    np.testing.assert_allclose(np.linalg.norm(X, axis=0), 1.0, atol=1e-12)
    Z = standardize_columns(np.zeros((3, 2)))
    assert not np.any(Z)


def test_choose_is_a_partial_permutation():
    picks = Stream(9).choose(10, 10)
    assert sorted(picks) == list(range(10))


def test_normal_moments():
    z = Stream(4).normal(200_001)
    assert z.size == 200_001
    assert abs(z.mean()) < 0.01 and abs(z.std() - 1) < 0.01


@pytest.mark.parametrize("kwargs", [dict(n=0, p=3), dict(n=3, p=2, sparsity=3), dict(n=3, p=3, sigma=-1.0),
                                    dict(n=3, p=3, magnitude=(2.0, 1.0))])
def test_invalid_spec(kwargs):
    with pytest.raises(ValueError):
        GenSpec(**kwargs)
