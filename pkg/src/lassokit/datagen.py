"""Deterministic synthetic data for tests and benchmarks.

Random stream
-------------
All randomness comes from ``numpy.random.PCG64(seed)`` consumed *only*
through ``Generator.random()`` (uniform doubles in [0, 1), 53-bit).  Every
other variate is a documented transform of those uniforms, so the stream
can be reproduced outside numpy:

* normal pairs by Box-Muller: ``u1, u2 -> sqrt(-2 log(1 - u1)) *
  (cos(2 pi u2), sin(2 pi u2))``; an odd count discards the last sine.
* integer ``j`` in ``[0, m)`` as ``floor(u * m)``.

``gen_linear`` draws, in order: X (n*p normals, row-major), the support
(partial Fisher-Yates over ``0..p-1``, ``s`` integer draws), magnitudes
(``s`` uniforms mapped to ``[lo, hi)``), signs (``s`` uniforms, negative
when ``u < 0.5``), then the noise vector (``n`` normals).  The noise is
drawn even when ``sigma = 0`` so changing sigma never shifts other draws.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["GenSpec", "Stream", "gen_linear", "standardize_columns"]


class Stream:
    """PCG64 uniforms plus the Box-Muller / floor transforms above."""

    def __init__(self, seed):
        self._gen = np.random.Generator(np.random.PCG64(int(seed)))

    def uniform(self, size):
        return self._gen.random(size)

    def normal(self, size):
        # scalar libm calls: numpy's vectorised log/cos/sin may differ in
        # the last bit across CPUs, which would break seed portability
        m = (size + 1) // 2
        u = self._gen.random(2 * m).tolist()
        z = []
        for u1, u2 in zip(u[0::2], u[1::2]):
            r = math.sqrt(-2.0 * math.log1p(-u1))
            theta = 2.0 * math.pi * u2
            z.append(r * math.cos(theta))
            z.append(r * math.sin(theta))
        return np.array(z[:size])

    def integer(self, m):
        return min(int(self._gen.random() * m), m - 1)

    def choose(self, p, s):
        """First ``s`` entries of a partial Fisher-Yates shuffle of 0..p-1."""
        idx = list(range(p))
        for i in range(s):
            j = i + self.integer(p - i)
            idx[i], idx[j] = idx[j], idx[i]
        return idx[:s]


@dataclass(frozen=True)
class GenSpec:
    n: int
    p: int
    sparsity: int = 5
    sigma: float = 0.5
    magnitude: tuple = (1.0, 3.0)
    seed: int = 0
    standardize: bool = False

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        if not 0 <= self.sparsity <= self.p:
            raise ValueError("sparsity must lie in [0, p]")
        if not self.sigma >= 0:
            raise ValueError("sigma must be >= 0")
        lo, hi = self.magnitude
        if not 0 <= lo <= hi:
            raise ValueError("magnitude range must satisfy 0 <= lo <= hi")


def standardize_columns(X):
    """Scale columns to unit Euclidean norm (zero columns left alone)."""
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=0)
    norms[norms == 0] = 1.0
    return X / norms


def gen_linear(spec):
    """Draw ``(X, y, beta_star)`` with ``y = X beta_star + sigma * w``."""
    st = Stream(spec.seed)
    n, p, s = spec.n, spec.p, spec.sparsity
    X = st.normal(n * p).reshape(n, p)
    if spec.standardize:
        X = standardize_columns(X)
    support = st.choose(p, s)
    lo, hi = spec.magnitude
    mags = lo + (hi - lo) * st.uniform(s)
    signs = np.where(st.uniform(s) < 0.5, -1.0, 1.0)
    beta = np.zeros(p)
    beta[support] = signs * mags
    noise = st.normal(n)
    y = X @ beta + spec.sigma * noise
    return X, y, beta
