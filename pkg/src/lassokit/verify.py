"""Reference solutions, convergence-bound checks and solver benchmarks."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .descent import MomentumSchedule
from .errors import BoundPairingError, ConvergenceError, DivergenceError, OracleUnstableError
from .linalg import restricted_solve
from .problem import soft_threshold
from .solvers import SolverConfig, run_solver

__all__ = [
    "THEOREMS",
    "BoundReport",
    "SolverBench",
    "BenchResult",
    "oracle_solve",
    "bound_rhs",
    "check_bound",
    "check_lemma_bound",
    "bench_run",
]

# theorem id -> algorithm whose traces it applies to
THEOREMS = {
    "T1-ISTA": "ista",
    "T2-FISTA": "fista",
    "T3-CGDA": "cgda",
    "T4-SLA": "sla",
    "L1-GD": "gd",
    "L2-AGD": "agd",
}
THEOREM_FOR = {v: k for k, v in THEOREMS.items()}

SLACK_ALLOWANCE = 1e-9
ORACLE_TOL = 1e-10


@dataclass
class BoundReport:
    theorem: str
    ks: np.ndarray
    gaps: np.ndarray
    rhs: np.ndarray
    allowance: float = SLACK_ALLOWANCE

    @property
    def slack(self):
        return self.rhs - self.gaps

    @property
    def violated_at(self):
        bad = np.flatnonzero(self.slack < -self.allowance)
        return int(self.ks[bad[0]]) if bad.size else None

    @property
    def holds(self):
        return self.violated_at is None

    @property
    def verdict(self):
        k = self.violated_at
        return "holds" if k is None else "violated-at-%d" % k

    @property
    def min_slack(self):
        return float(self.slack.min()) if self.slack.size else float("inf")


def _support(beta, eps=0.0):
    return tuple(np.flatnonzero(np.abs(beta) > eps))


def oracle_solve(problem, tol=ORACLE_TOL, max_iters=2_000_000, window=100):
    """High-accuracy Lasso solution used as ``beta_hat`` by every check.

    FISTA is run until the KKT residual is at most ``tol/10`` and the
    support has stayed fixed for ``window`` consecutive iterations; the result
    is then polished by solving the optimality equations exactly on the
    detected support, ``X_S'X_S b = X_S'y - n lam sign(b)``.  The polished
    point is kept when its signs agree with the support and its residual is
    no worse.  Entries of magnitude at most ``tol`` count as zero when
    tracking the support, so coordinates sitting exactly on the threshold
    cannot flicker it forever.  A support that keeps changing until ``max_iters`` raises
    ``OracleUnstableError``.
    """
    if tol < 1e-12:
        raise ValueError("oracle tolerance below 1e-12 is not attainable in float64")
    p, n, lam = problem.p, problem.n, problem.lam
    gram, xty = problem.gram, problem.xty
    beta = np.zeros(p)
    if problem.kkt_from_gram(beta, np.zeros(p)) <= tol / 10:
        return beta
    if problem.L == 0.0:
        return beta
    step = 1.0 / problem.L
    thresh = step * lam
    schedule = MomentumSchedule("fista_t")
    beta_prev = beta
    kkt = math.inf
    support, stable = None, 0
    k = 0
    # stop once the residual is small AND the support has not moved for
    # `window` consecutive iterations
    while kkt > tol / 10 or stable < window:
        k += 1
        if k > max_iters:
            if kkt <= tol / 10:
                raise OracleUnstableError(
                    "support still changing after %d iterations at KKT %g" % (max_iters, kkt))
            raise ConvergenceError("oracle FISTA did not reach KKT %g in %d iterations" % (tol / 10, max_iters))
        w = schedule.weight(k)
        alpha = beta + w * (beta - beta_prev) if w != 0.0 else beta
        beta_prev, beta = beta, soft_threshold(alpha - step * ((gram @ alpha - xty) / n), thresh)
        kkt = problem.kkt_from_gram(beta, gram @ beta)
        s_now = _support(beta, tol)
        if s_now == support:
            stable += 1
        else:
            support, stable = s_now, 0
        if kkt == 0.0:
            break

    S = list(support)
    if S:
        signs = np.zeros(p)
        signs[S] = np.sign(beta[S])
        try:
            polished = restricted_solve(gram, xty - n * lam * signs, S)
        except ArithmeticError:
            polished = None
        if polished is not None and np.all(np.sign(polished[S]) == signs[S]):
            kkt_pol = problem.kkt_from_gram(polished, gram @ polished)
            if kkt_pol <= kkt:
                beta, kkt = polished, kkt_pol
    if kkt > tol:
        raise ConvergenceError("oracle residual %g above tolerance %g" % (kkt, tol))
    return beta


def bound_rhs(theorem, ks, *, L, dist_sq, p=None, n=None, lam=None, gamma=None):
    """Right-hand side of a convergence bound evaluated at iteration counts ``ks``.

    ``dist_sq`` is ``||x^(0) - x*||^2``.  Lasso theorems use ``L``; the
    generic lemmas use the step ``gamma`` instead.
    """
    k = np.asarray(ks, dtype=float)
    if theorem == "T1-ISTA":
        return L * dist_sq / (2.0 * k)
    if theorem == "T2-FISTA":
        return 2.0 * L * dist_sq / (k + 1.0) ** 2
    if theorem == "T3-CGDA":
        return 4.0 * L * (1.0 + p) * dist_sq / (k + 8.0 / p)
    if theorem == "T4-SLA":
        return 4.0 * dist_sq * L / k**2 + 4.0 * math.sqrt(2.0 * lam * n * math.log(2.0)) * math.sqrt(dist_sq) / k
    if theorem == "L1-GD":
        return dist_sq / (2.0 * gamma * k)
    if theorem == "L2-AGD":
        return 2.0 * dist_sq / (gamma * (k + 1.0) ** 2)
    raise BoundPairingError("unknown theorem id %r" % theorem)


def check_bound(trace, problem, beta_hat, theorem=None, allowance=SLACK_ALLOWANCE):
    """Compare ``F(beta^(k)) - F(beta_hat)`` with a theorem's right-hand side.

    Every recorded ``k >= 1`` is checked.  ``L`` is the problem's Lipschitz
    constant (``sigma_max(X'X/n)``, which equals ``sigma_max(X/sqrt n)^2``)
    regardless of the step the trace actually used.
    """
    if theorem is None:
        theorem = THEOREM_FOR.get(trace.algorithm)
    if theorem not in THEOREMS or THEOREMS[theorem] in ("gd", "agd"):
        raise BoundPairingError("no Lasso theorem %r" % (theorem,))
    if THEOREMS[theorem] != trace.algorithm:
        raise BoundPairingError("%s applies to %s traces, got %s" % (theorem, THEOREMS[theorem], trace.algorithm))
    beta_hat = problem.check_beta(beta_hat)
    f_hat = problem.objective_from_gram(beta_hat, problem.gram @ beta_hat)
    ks = np.asarray(trace.ks)
    objs = np.asarray(trace.objectives)
    keep = ks >= 1
    d = np.asarray(trace.x0) - beta_hat
    rhs = bound_rhs(theorem, ks[keep], L=problem.L, dist_sq=float(d @ d),
                    p=problem.p, n=problem.n, lam=problem.lam)
    return BoundReport(theorem, ks[keep], objs[keep] - f_hat, rhs, allowance)


def check_lemma_bound(trace, f_star, x_star, gamma, lemma, allowance=1e-12):
    """Lemma bounds for generic GD / AGD traces on a function with known minimiser.

    For backtracking runs pass ``gamma = min(1, shrink/L)``.
    """
    if lemma not in ("L1-GD", "L2-AGD"):
        raise BoundPairingError("unknown lemma id %r" % (lemma,))
    ks = np.asarray(trace.ks)
    keep = ks >= 1
    d = np.asarray(trace.x0, dtype=float) - np.asarray(x_star, dtype=float)
    rhs = bound_rhs(lemma, ks[keep], L=None, dist_sq=float(d @ d), gamma=gamma)
    gaps = np.asarray(trace.objectives)[keep] - f_star
    return BoundReport(lemma, ks[keep], gaps, rhs, allowance)


@dataclass
class SolverBench:
    name: str
    trace: object
    iters_to: dict
    wall_s: float
    final_kkt: float
    bound: BoundReport = None
    f_hat: float = 0.0

    @property
    def gaps(self):
        return np.asarray(self.trace.objectives) - self.f_hat


@dataclass
class BenchResult:
    beta_hat: np.ndarray
    f_hat: float
    targets: tuple
    solvers: dict = field(default_factory=dict)

    def rows(self):
        """Trace table rows ``(algo, k, objective, gap, bound_rhs)``."""
        out = []
        for name, sb in self.solvers.items():
            rhs = {}
            if sb.bound is not None:
                rhs = dict(zip(sb.bound.ks.tolist(), sb.bound.rhs.tolist()))
            for k, obj in zip(sb.trace.ks, sb.trace.objectives):
                out.append((name, k, obj, obj - self.f_hat, rhs.get(k, float("nan"))))
        return out

    @property
    def all_bounds_hold(self):
        return all(sb.bound is None or sb.bound.holds for sb in self.solvers.values())


def bench_run(problem, solvers, cfg=None, alpha=200.0, targets=(1e-2, 1e-4, 1e-6),
              beta_hat=None, step_scale=1.0, check_bounds=True):
    """Run each solver from zero against one shared oracle.

    Parameters
    ----------
    problem : LassoProblem
    solvers : sequence of str
        Names from ``solvers.SOLVERS``.
    cfg : SolverConfig, optional
        Defaults to 1000 fixed iterations (``gap_tol = 0``).
    alpha : float
        Surrogate sharpness for ``sla``.
    step_scale : float
        Step multiplier for ista/fista (values > 1 are the adversarial mode).

    Returns
    -------
    BenchResult
    """
    solvers = list(solvers)
    if not solvers:
        raise ValueError("bench_run needs at least one solver")
    cfg = cfg or SolverConfig(max_iters=1000, gap_tol=0.0)
    if beta_hat is None:
        beta_hat = oracle_solve(problem)
    f_hat = problem.objective_from_gram(beta_hat, problem.gram @ beta_hat)
    result = BenchResult(beta_hat, f_hat, tuple(targets))
    for name in solvers:
        kwargs = {"step_scale": step_scale} if name in ("ista", "fista") and step_scale != 1.0 else {}
        t0 = time.perf_counter()
        try:
            # an oversized step is expected to overflow before it is caught
            with np.errstate(over="ignore", invalid="ignore"):
                trace = run_solver(name, problem, cfg, alpha=alpha, **kwargs)
        except DivergenceError as exc:
            if not check_bounds or exc.trace is None:
                raise DivergenceError(exc.iteration, name, exc.trace) from exc
            # keep the partial trace: the bound check reports the violation
            trace = exc.trace
            trace.info["status"] = "diverged"
        wall = time.perf_counter() - t0
        gaps = np.asarray(trace.objectives) - f_hat
        iters_to = {}
        for tgt in targets:
            hit = np.flatnonzero(gaps <= tgt)
            iters_to[tgt] = int(trace.ks[hit[0]]) if hit.size else None
        bound = check_bound(trace, problem, beta_hat) if check_bounds else None
        result.solvers[name] = SolverBench(name, trace, iters_to, wall, trace.kkt[-1], bound, f_hat)
    return result
