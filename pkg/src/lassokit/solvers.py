"""Iterative Lasso solvers: ISTA, FISTA, cyclic coordinate descent and the
smoothed-l1 accelerated method.

Every solver works from the cached Gram quantities of a ``LassoProblem``
(``X'X``, ``X'y``, ``L``), so one iteration costs O(p^2) regardless of n,
and returns an ``IterateTrace`` whose record 0 is the starting point.
"""

import time
from dataclasses import dataclass

import numpy as np

from .descent import IterateTrace, MomentumSchedule
from .errors import DegenerateColumnError, DegenerateProblemError, DivergenceError
from .problem import SurrogateParams, soft_threshold, surrogate_phi, surrogate_phi_prime

__all__ = [
    "SolverConfig",
    "IterateTrace",
    "solve_ista",
    "solve_fista",
    "solve_cgda",
    "solve_sla",
    "SOLVERS",
    "run_solver",
]


@dataclass(frozen=True)
class SolverConfig:
    """Iteration budget and stopping rule shared by all solvers.

    A run stops after ``max_iters`` iterations or as soon as the stopping
    residual drops to ``gap_tol`` (KKT residual for the exact solvers,
    surrogate gradient sup-norm for SLA).  ``gap_tol = 0`` runs exactly
    ``max_iters`` iterations, which is what the bound checks use.
    """

    max_iters: int = 10_000
    gap_tol: float = 1e-8
    record_every: int = 1

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if not self.gap_tol >= 0:
            raise ValueError("gap_tol must be >= 0")


def _start(problem, x0):
    if x0 is None:
        return np.zeros(problem.p)
    return np.array(problem.check_beta(x0), copy=True)


def _zero_design(problem, algorithm, x0, cfg):
    # X = 0: the smooth part is constant, so beta = 0 is optimal for lam > 0.
    if problem.lam == 0.0:
        raise DegenerateProblemError("L = 0 and lam = 0: every beta is optimal")
    trace = IterateTrace(algorithm, x0.copy(), step=float("inf"))
    beta = np.zeros(problem.p)
    g0 = problem.gram @ x0
    trace.record(0, x0, problem.objective_from_gram(x0, g0), problem.kkt_from_gram(x0, g0), 0)
    trace.record(1, beta, problem.objective_from_gram(beta, beta), 0.0, 0)
    trace.converged = True
    trace.info.update(L=0.0, status="converged")
    return trace


def _finish(trace, k, cfg, converged, beta, obj, kkt, t0, surrogate=None):
    if not trace.ks or trace.ks[-1] != k:
        trace.record(k, beta, obj, kkt, time.perf_counter_ns() - t0, surrogate)
    trace.converged = converged
    trace.info["status"] = "converged" if converged else "max_iters"
    return trace


def solve_ista(problem, x0=None, cfg=None, step_scale=1.0):
    """ISTA with fixed step ``1/L``.

    ``beta <- S(beta - (X'X beta - X'y)/(n L), lam/L)``.

    ``step_scale`` multiplies the step (``step_scale/L``).  Values above 1
    break the convergence guarantee; they exist so the bound checker can be
    shown to catch a broken solver.
    """
    cfg = cfg or SolverConfig()
    beta = _start(problem, x0)
    if problem.L == 0.0:
        return _zero_design(problem, "ista", beta, cfg)
    step = step_scale / problem.L
    thresh = step * problem.lam
    gram, xty, n = problem.gram, problem.xty, problem.n

    trace = IterateTrace("ista", beta.copy(), step=step)
    trace.info.update(L=problem.L, step_scale=step_scale)
    t0 = time.perf_counter_ns()
    gb = gram @ beta
    obj, kkt = problem.objective_from_gram(beta, gb), problem.kkt_from_gram(beta, gb)
    trace.record(0, beta, obj, kkt, 0)
    k = 0
    converged = kkt <= cfg.gap_tol
    while not converged and k < cfg.max_iters:
        k += 1
        beta = soft_threshold(beta - step * ((gb - xty) / n), thresh)
        gb = gram @ beta
        obj, kkt = problem.objective_from_gram(beta, gb), problem.kkt_from_gram(beta, gb)
        if not np.isfinite(obj):
            raise DivergenceError(k, "ista", trace)
        converged = kkt <= cfg.gap_tol
        if k % cfg.record_every == 0:
            trace.record(k, beta, obj, kkt, time.perf_counter_ns() - t0)
    return _finish(trace, k, cfg, converged, beta, obj, kkt, t0)


def solve_fista(problem, x0=None, cfg=None, step_scale=1.0):
    """FISTA: ISTA step taken at an extrapolated point.

    ``alpha^(1) = beta^(0)``, ``t_1 = 1``; for ``k >= 1``::

        beta^(k)    = S(alpha^(k) - (X'X alpha^(k) - X'y)/(n L), lam/L)
        t_{k+1}     = (1 + sqrt(1 + 4 t_k^2)) / 2
        alpha^(k+1) = beta^(k) + (t_k - 1)/t_{k+1} (beta^(k) - beta^(k-1))
    """
    cfg = cfg or SolverConfig()
    beta = _start(problem, x0)
    if problem.L == 0.0:
        return _zero_design(problem, "fista", beta, cfg)
    step = step_scale / problem.L
    thresh = step * problem.lam
    gram, xty, n = problem.gram, problem.xty, problem.n
    schedule = MomentumSchedule("fista_t")

    trace = IterateTrace("fista", beta.copy(), step=step)
    trace.info.update(L=problem.L, step_scale=step_scale)
    t0 = time.perf_counter_ns()
    gb = gram @ beta
    obj, kkt = problem.objective_from_gram(beta, gb), problem.kkt_from_gram(beta, gb)
    trace.record(0, beta, obj, kkt, 0)
    beta_prev = beta
    k = 0
    converged = kkt <= cfg.gap_tol
    while not converged and k < cfg.max_iters:
        k += 1
        w = schedule.weight(k)
        alpha = beta + w * (beta - beta_prev) if w != 0.0 else beta
        v = alpha - step * ((gram @ alpha - xty) / n)
        beta_prev, beta = beta, soft_threshold(v, thresh)
        gb = gram @ beta
        obj, kkt = problem.objective_from_gram(beta, gb), problem.kkt_from_gram(beta, gb)
        if not np.isfinite(obj):
            raise DivergenceError(k, "fista", trace)
        converged = kkt <= cfg.gap_tol
        if k % cfg.record_every == 0:
            trace.record(k, beta, obj, kkt, time.perf_counter_ns() - t0)
    return _finish(trace, k, cfg, converged, beta, obj, kkt, t0)


def solve_cgda(problem, x0=None, cfg=None, sweep="gauss-seidel"):
    """Cyclic coordinate descent, one record per full sweep over j = 1..p.

    Each coordinate is set to its exact one-dimensional minimiser::

        beta_j = S(x_j'y - sum_{l != j} (X'X)_{jl} beta_l, n lam) / (X'X)_{jj}

    ``sweep="gauss-seidel"`` (default) uses the freshest values within a
    sweep; ``sweep="jacobi"`` uses only values from the previous sweep and
    carries no convergence guarantee.
    """
    if sweep not in ("gauss-seidel", "jacobi"):
        raise ValueError("sweep must be 'gauss-seidel' or 'jacobi'")
    cfg = cfg or SolverConfig()
    beta = _start(problem, x0)
    gram, xty, n = problem.gram, problem.xty, problem.n
    diag = np.diag(gram).copy()
    zero = np.flatnonzero(diag <= 0.0)
    if zero.size:
        raise DegenerateColumnError(zero[0])
    thresh = n * problem.lam

    trace = IterateTrace("cgda", beta.copy(), step=float("nan"))
    trace.info.update(L=problem.L, sweep=sweep)
    t0 = time.perf_counter_ns()
    gb = gram @ beta
    obj, kkt = problem.objective_from_gram(beta, gb), problem.kkt_from_gram(beta, gb)
    trace.record(0, beta, obj, kkt, 0)
    k = 0
    converged = kkt <= cfg.gap_tol
    p = problem.p
    while not converged and k < cfg.max_iters:
        k += 1
        if sweep == "jacobi":
            beta = soft_threshold(xty - gb + diag * beta, thresh) / diag
        else:
            beta = beta.copy()
            for j in range(p):
                r = xty[j] - (gram[j] @ beta - diag[j] * beta[j])
                if r > thresh:
                    beta[j] = (r - thresh) / diag[j]
                elif r < -thresh:
                    beta[j] = (r + thresh) / diag[j]
                else:
                    beta[j] = 0.0
        gb = gram @ beta
        obj, kkt = problem.objective_from_gram(beta, gb), problem.kkt_from_gram(beta, gb)
        if not np.isfinite(obj):
            raise DivergenceError(k, "cgda", trace)
        converged = kkt <= cfg.gap_tol
        if k % cfg.record_every == 0:
            trace.record(k, beta, obj, kkt, time.perf_counter_ns() - t0)
    return _finish(trace, k, cfg, converged, beta, obj, kkt, t0)


def sla_step(problem, params):
    """Fixed SLA step ``1 / (L + lam * alpha / 2)``."""
    return 1.0 / (problem.L + problem.lam * params.alpha / 2.0)


def solve_sla(problem, params, x0=None, cfg=None, continuation=0):
    """Accelerated gradient descent on the softplus-smoothed objective.

    Minimises ``F_alpha(beta) = ||y - X beta||^2/(2n) + lam sum phi_alpha(beta_i)``
    with fixed step ``mu = 1/(L + lam alpha/2)`` and extrapolation weight
    ``(k-2)/(k+1)``.  The trace records the true objective in
    ``objectives`` and ``F_alpha`` in ``surrogate``; ``kkt`` is the true
    Lasso KKT residual, while stopping uses ``max|grad F_alpha|``.

    ``continuation=m`` first solves with ``alpha / 10**m``, then
    ``alpha / 10**(m-1)``, ..., warm-starting each stage, each with the full
    ``cfg.max_iters`` budget.
    """
    if not isinstance(params, SurrogateParams):
        params = SurrogateParams(float(params))
    cfg = cfg or SolverConfig()
    beta = _start(problem, x0)
    if problem.L == 0.0 and problem.lam == 0.0:
        raise DegenerateProblemError("L = 0 and lam = 0: every beta is optimal")
    gram, xty, n, lam = problem.gram, problem.xty, problem.n, problem.lam

    trace = IterateTrace("sla", beta.copy())
    trace.info.update(L=problem.L, alpha=params.alpha, continuation=continuation)
    t0 = time.perf_counter_ns()

    def evaluate(b, prm):
        gb = gram @ b
        smooth = problem.smooth_from_gram(b, gb)
        obj = smooth + lam * float(np.sum(np.abs(b)))
        sur = smooth + lam * float(np.sum(surrogate_phi(b, prm)))
        sgrad = (gb - xty) / n + lam * surrogate_phi_prime(b, prm)
        return gb, obj, sur, sgrad

    stages = [SurrogateParams(params.alpha / 10.0 ** m) for m in range(continuation, -1, -1)]
    gb, obj, sur, sgrad = evaluate(beta, stages[0])
    kkt = problem.kkt_from_gram(beta, gb)
    trace.record(0, beta, obj, kkt, 0, sur)
    k = 0
    converged = False
    for prm in stages:
        mu = sla_step(problem, prm)
        trace.step = mu
        schedule = MomentumSchedule("nesterov_ratio")
        beta_prev = beta
        gb, obj, sur, sgrad = evaluate(beta, prm)
        converged = float(np.max(np.abs(sgrad), initial=0.0)) <= cfg.gap_tol
        stage_k = 0
        while not converged and stage_k < cfg.max_iters:
            stage_k += 1
            k += 1
            w = schedule.weight(stage_k)
            wk = beta + w * (beta - beta_prev) if w != 0.0 else beta
            g = (gram @ wk - xty) / n + lam * surrogate_phi_prime(wk, prm)
            beta_prev, beta = beta, wk - mu * g
            gb, obj, sur, sgrad = evaluate(beta, prm)
            if not np.isfinite(sur):
                raise DivergenceError(k, "sla", trace)
            kkt = problem.kkt_from_gram(beta, gb)
            converged = float(np.max(np.abs(sgrad), initial=0.0)) <= cfg.gap_tol
            if k % cfg.record_every == 0:
                trace.record(k, beta, obj, kkt, time.perf_counter_ns() - t0, sur)
    kkt = problem.kkt_from_gram(beta, gb)
    return _finish(trace, k, cfg, converged, beta, obj, kkt, t0, sur)


SOLVERS = {
    "ista": solve_ista,
    "fista": solve_fista,
    "cgda": solve_cgda,
    "sla": solve_sla,
}


def run_solver(name, problem, cfg=None, alpha=None, x0=None, **kwargs):
    """Dispatch by algorithm name; ``alpha`` is required for ``sla``."""
    if name not in SOLVERS:
        raise ValueError("unknown solver %r (choose from %s)" % (name, ", ".join(SOLVERS)))
    if name == "sla":
        if alpha is None:
            raise ValueError("sla needs alpha")
        return solve_sla(problem, SurrogateParams(float(alpha)), x0=x0, cfg=cfg, **kwargs)
    return SOLVERS[name](problem, x0=x0, cfg=cfg, **kwargs)
