"""Generic first-order machinery: gradient descent, accelerated proximal
gradient, the l1 prox, backtracking, and the momentum schedules."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, LineSearchError
from .problem import soft_threshold

__all__ = [
    "IterateTrace",
    "StepRule",
    "MomentumSchedule",
    "run_gd",
    "run_agd",
    "prox_l1",
    "backtracking_search",
]


@dataclass
class IterateTrace:
    """Per-iteration record of a run.

    Record ``k = 0`` is the starting point.  ``kkt`` holds the Lasso KKT
    residual for Lasso solvers and the gradient sup-norm for generic runs.
    ``surrogate`` is only filled by the smoothed solver.
    """

    algorithm: str
    x0: np.ndarray
    step: float = float("nan")
    ks: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    objectives: list = field(default_factory=list)
    kkt: list = field(default_factory=list)
    elapsed_ns: list = field(default_factory=list)
    surrogate: list = field(default_factory=list)
    converged: bool = False
    info: dict = field(default_factory=dict)

    def record(self, k, x, obj, kkt=float("nan"), elapsed_ns=0, surrogate=None):
        if self.ks and k <= self.ks[-1]:
            raise ValueError("trace indices must increase (%d after %d)" % (k, self.ks[-1]))
        self.ks.append(int(k))
        self.iterates.append(np.array(x, dtype=float, copy=True))
        self.objectives.append(float(obj))
        self.kkt.append(float(kkt))
        self.elapsed_ns.append(int(elapsed_ns))
        if surrogate is not None:
            self.surrogate.append(float(surrogate))

    def __len__(self):
        return len(self.ks)

    @property
    def final(self):
        return self.iterates[-1]

    @property
    def iterations(self):
        return self.ks[-1] if self.ks else 0

    def as_arrays(self):
        return np.asarray(self.ks), np.asarray(self.objectives), np.asarray(self.kkt)


@dataclass(frozen=True)
class StepRule:
    """Fixed step ``gamma`` or backtracking with factor ``shrink``."""

    mode: str = "fixed"
    gamma: float = 1.0
    shrink: float = 0.5

    def __post_init__(self):
        if self.mode not in ("fixed", "backtracking"):
            raise ValueError("unknown step mode %r" % self.mode)
        if self.mode == "fixed" and not self.gamma > 0:
            raise ValueError("fixed step needs gamma > 0")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must lie in (0, 1)")

    @classmethod
    def fixed(cls, gamma):
        return cls("fixed", float(gamma))

    @classmethod
    def backtracking(cls, shrink=0.5):
        return cls("backtracking", 1.0, float(shrink))


class MomentumSchedule:
    """Extrapolation weights for accelerated methods.

    ``weight(k)`` is the coefficient on ``x^(k-1) - x^(k-2)`` used to form
    the extrapolated point at iteration ``k >= 1``.

    * ``none``: always 0.
    * ``nesterov_ratio``: ``(k - 2)/(k + 1)``, clamped at 0 for ``k = 1``.
    * ``fista_t``: ``(t_{k-1} - 1)/t_k`` with ``t_1 = 1`` and
      ``t_{k+1} = (1 + sqrt(1 + 4 t_k^2))/2``; 0 at ``k = 1``.
    """

    KINDS = ("none", "nesterov_ratio", "fista_t")

    def __init__(self, kind="none"):
        if kind not in self.KINDS:
            raise ValueError("unknown momentum schedule %r" % kind)
        self.kind = kind
        self._t = [None, 1.0]  # t[k], 1-based

    def __repr__(self):
        return "MomentumSchedule(%r)" % self.kind

    def t(self, k):
        while len(self._t) <= k:
            tk = self._t[-1]
            self._t.append((1.0 + math.sqrt(1.0 + 4.0 * tk * tk)) / 2.0)
        return self._t[k]

    def weight(self, k):
        if self.kind == "none" or k <= 1:
            return 0.0
        if self.kind == "nesterov_ratio":
            return max(0.0, (k - 2) / (k + 1))
        return (self.t(k - 1) - 1.0) / self.t(k)


def _check_finite(value, k, algorithm, trace):
    if not np.all(np.isfinite(value)):
        raise DivergenceError(k, algorithm, trace)


def backtracking_search(f, grad, x, shrink=0.5, g=None, min_step=1e-15):
    """Largest ``gamma = shrink**m`` with sufficient decrease.

    Accepts the first ``gamma`` (starting from 1) for which
    ``f(x - gamma g) <= f(x) - gamma/2 ||g||^2`` where ``g = grad(x)``.
    """
    if not 0.0 < shrink < 1.0:
        raise ValueError("shrink must lie in (0, 1)")
    x = np.asarray(x, dtype=float)
    if g is None:
        g = np.asarray(grad(x), dtype=float)
    fx = f(x)
    gg = float(np.dot(g.ravel(), g.ravel()))
    gamma = 1.0
    while f(x - gamma * g) > fx - 0.5 * gamma * gg:
        gamma *= shrink
        if gamma < min_step:
            raise LineSearchError("no acceptable step above %g" % min_step)
    return gamma


def run_gd(f, grad, x0, rule, iters, algorithm="gd"):
    """Gradient descent ``x^(k) = x^(k-1) - gamma_{k-1} grad f(x^(k-1))``.

    Parameters
    ----------
    f, grad : callable
        Objective and its gradient.
    x0 : array_like
        Starting point.
    rule : StepRule
        Fixed step or backtracking.
    iters : int
        Number of iterations (>= 1).

    Returns
    -------
    IterateTrace
        One record per iteration; ``kkt`` holds ``max|grad f|``.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    x = np.array(x0, dtype=float, copy=True)
    trace = IterateTrace(algorithm, x.copy(), step=rule.gamma if rule.mode == "fixed" else float("nan"))
    t0 = time.perf_counter_ns()
    g = np.asarray(grad(x), dtype=float)
    fx = f(x)
    _check_finite(fx, 0, algorithm, trace)
    trace.record(0, x, fx, float(np.max(np.abs(g), initial=0.0)), 0)
    steps = []
    for k in range(1, iters + 1):
        if rule.mode == "fixed":
            gamma = rule.gamma
        else:
            gamma = backtracking_search(f, grad, x, rule.shrink, g=g)
        steps.append(gamma)
        x = x - gamma * g
        g = np.asarray(grad(x), dtype=float)
        fx = f(x)
        _check_finite(fx, k, algorithm, trace)
        _check_finite(g, k, algorithm, trace)
        trace.record(k, x, fx, float(np.max(np.abs(g), initial=0.0)), time.perf_counter_ns() - t0)
    trace.info["steps"] = steps
    return trace


def prox_l1(x, t, lam):
    """Prox of ``lam ||.||_1`` with parameter ``t``: ``S(x_i, t * lam)``."""
    if not t > 0:
        raise ValueError("prox_l1 needs t > 0, got %r" % (t,))
    return soft_threshold(np.asarray(x, dtype=float), t * lam)


def run_agd(g, grad_g, prox, x0, rule, schedule, iters, f=None, algorithm="agd"):
    """Accelerated proximal gradient.

    For ``k = 1, 2, ...``::

        y^(k) = x^(k-1) + w_k (x^(k-1) - x^(k-2))
        x^(k) = prox(y^(k) - gamma grad g(y^(k)), gamma)

    with ``x^(-1) = x^(0)`` and ``w_k`` from ``schedule``.  The prox map is
    called as ``prox(v, gamma)``; pass ``None`` for the identity (h = 0).
    ``f`` is the full objective ``g + h`` that gets recorded (defaults to
    ``g``).  Only fixed steps are supported here: Lasso solvers never
    backtrack, and the quadratic tests use ``gamma = 1/L``.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if rule.mode != "fixed":
        raise ValueError("run_agd supports fixed steps only")
    if isinstance(schedule, str):
        schedule = MomentumSchedule(schedule)
    f = g if f is None else f
    gamma = rule.gamma
    x = np.array(x0, dtype=float, copy=True)
    x_prev = x.copy()
    trace = IterateTrace(algorithm, x.copy(), step=gamma)
    t0 = time.perf_counter_ns()
    fx = f(x)
    _check_finite(fx, 0, algorithm, trace)
    trace.record(0, x, fx, float("nan"), 0)
    for k in range(1, iters + 1):
        w = schedule.weight(k)
        yk = x + w * (x - x_prev) if w != 0.0 else x
        v = yk - gamma * grad_g(yk)
        x_new = v if prox is None else prox(v, gamma)
        x_prev, x = x, x_new
        fx = f(x)
        _check_finite(fx, k, algorithm, trace)
        trace.record(k, x, fx, float("nan"), time.perf_counter_ns() - t0)
    return trace
