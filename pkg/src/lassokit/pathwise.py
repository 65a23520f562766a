"""Regularisation paths: homotopy path following, the counter-example that
defeats insertion-only path following, and LARS.

Conventions: indices are 0-based in code and 1-based in anything written
for people (reports, CSV).  With the 1/n scaling of the objective, on a
fixed support S with signs s the solution is affine in lambda::

    beta_S(lam) = (X_S'X_S)^{-1} (X_S'y - n lam s)
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .datagen import Stream
from .errors import (AmbiguityError, DimensionError, PathOverflowError, PathSingularityError,
                     SingularSupportError)
from .linalg import _cholesky, as_matrix, as_vector, restricted_least_squares

__all__ = [
    "SupportSet",
    "PathSegment",
    "RegPath",
    "lambda_max",
    "solve_path",
    "eval_path_at",
    "CounterExample",
    "build_counter_example",
    "sign_relation_rhs",
    "CounterExampleReport",
    "reproduce_counter_example",
    "LarsPath",
    "solve_lars",
]

log = logging.getLogger(__name__)

# relative distance below the current lambda for a candidate kink to count
_KINK_RTOL = 1e-10
# |v_j| this close to 1 counts as "on the boundary" for the sign relation
_RHS_ATOL = 1e-10
# a correlation whose slope is this close to the boundary's moves parallel
# to it and never crosses
_SLOPE_ATOL = 1e-9


@dataclass(frozen=True)
class SupportSet:
    indices: tuple
    signs: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        sg = tuple(int(s) for s in self.signs)
        if list(idx) != sorted(set(idx)):
            raise ValueError("support indices must be unique and sorted")
        if len(sg) != len(idx) or any(s not in (-1, 1) for s in sg):
            raise ValueError("need one sign in {-1, +1} per index")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "signs", sg)

    def __len__(self):
        return len(self.indices)

    def one_based(self):
        return [i + 1 for i in self.indices]


@dataclass
class PathSegment:
    """``beta_S(lam) = intercept + lam * slope`` for ``lambda_lo <= lam <= lambda_hi``."""

    lambda_hi: float
    lambda_lo: float
    support: SupportSet
    intercept: np.ndarray
    slope: np.ndarray

    def beta(self, lam, p):
        out = np.zeros(p)
        idx = list(self.support.indices)
        if idx:
            out[idx] = self.intercept + lam * self.slope
        return out


@dataclass
class RegPath:
    p: int
    lambda0: float
    mode: str
    segments: list = field(default_factory=list)
    status: str = "completed"
    diagnostic: dict = None
    # (loop, kind, 0-based index, lambda) for every support change
    events: list = field(default_factory=list)

    @property
    def kinks(self):
        ks = [self.lambda0]
        ks.extend(seg.lambda_lo for seg in self.segments)
        return ks

    @property
    def lambda_end(self):
        return self.segments[-1].lambda_lo if self.segments else self.lambda0

    def supports(self):
        return [seg.support for seg in self.segments]


def lambda_max(problem):
    """Smallest lambda with an all-zero solution: ``||X'y||_inf / n``."""
    return problem.lambda_max


def _affine_law(gram, xty, n, S, signs):
    """Intercept and slope of beta_S(lam) on support S."""
    try:
        c = _cholesky(gram[np.ix_(S, S)], S)
    except SingularSupportError as exc:
        raise PathSingularityError(exc.support) from None
    rhs = np.column_stack([xty[S], -n * signs])
    sol = scipy.linalg.cho_solve(c, rhs, check_finite=False)
    return sol[:, 0], sol[:, 1]


def sign_relation_rhs(gram, support, signs):
    """``X_{S^c}'X_S (X_S'X_S)^{-1} sign(beta_S)`` for every inactive index.

    Returns ``(inactive_indices, rhs)``.  When the support is right and the
    irrepresentable-type condition holds, every entry is strictly inside
    (-1, 1); entries on the boundary can only enter the support together.
    """
    p = gram.shape[0]
    S = list(support)
    inactive = [j for j in range(p) if j not in set(S)]
    if not S:
        return np.array(inactive, dtype=int), np.zeros(len(inactive))
    try:
        c = _cholesky(gram[np.ix_(S, S)], S)
    except SingularSupportError as exc:
        raise PathSingularityError(exc.support) from None
    z = scipy.linalg.cho_solve(c, np.asarray(signs, dtype=float), check_finite=False)
    return np.array(inactive, dtype=int), gram[np.ix_(inactive, S)] @ z


def solve_path(problem, min_lambda=0.0, mode="full", max_segments=None):
    """Piecewise-linear Lasso path from ``lambda_max`` down to ``min_lambda``.

    ``mode="full"`` is exact homotopy: between kinks the active set is fixed
    and beta is affine in lambda; a kink is the largest lambda below the
    current one where an inactive correlation ``|X_j'(y - X beta)|/n``
    reaches lambda (insertion) or an active coefficient hits zero
    (deletion).  Ties go to the lowest index.

    ``mode="insertion-only"`` follows the loop-by-loop narrative of
    support-enlarging path following literally: each loop refits by least
    squares on the current support, admits the inactive predictor most
    correlated with that residual (at ``lambda = |correlation|/n``), and
    first checks the sign relation ``X_{S^c}'X_S(X_S'X_S)^{-1}sign(beta_S)``.
    If two or more inactive entries sit on the boundary ``|v_j| = 1`` no
    single insertion is consistent and the path stops with status
    ``failed_insertion``.  This mode is not a correct Lasso solver in
    general; it exists to reproduce that failure.
    """
    if mode not in ("full", "insertion-only"):
        raise ValueError("mode must be 'full' or 'insertion-only'")
    if min_lambda < 0:
        raise ValueError("min_lambda must be >= 0")
    p, n = problem.p, problem.n
    gram, xty = problem.gram, problem.xty
    lam0 = problem.lambda_max
    path = RegPath(p, lam0, mode)
    if lam0 == 0.0 or lam0 <= min_lambda:
        return path
    cap = max_segments if max_segments is not None else 10 * p * max(1, n)

    j0 = int(np.argmax(np.abs(xty)))
    if np.sum(np.abs(xty) == np.abs(xty[j0])) > 1:
        log.info("tie at lambda_max; entering lowest index %d", j0 + 1)
    active = {j0: 1 if xty[j0] > 0 else -1}
    path.events.append((1, "insert", j0, lam0))
    if mode == "full":
        _full_path(problem, path, active, lam0, min_lambda, cap)
    else:
        _insertion_only_path(problem, path, active, lam0, min_lambda, cap)
    return path


def _push_segment(path, cap, lam_hi, lam_lo, S, signs, a, b):
    if len(path.segments) >= cap:
        raise PathOverflowError("path exceeded %d segments" % cap)
    path.segments.append(PathSegment(lam_hi, lam_lo, SupportSet(S, signs), a.copy(), b.copy()))


def _full_path(problem, path, active, lam, min_lambda, cap):
    p, n = problem.p, problem.n
    gram, xty = problem.gram, problem.xty
    loop = 1
    while True:
        S = sorted(active)
        s = np.array([active[j] for j in S], dtype=float)
        a, b = _affine_law(gram, xty, n, S, s)
        inactive = np.array([j for j in range(p) if j not in active], dtype=int)

        # Inactive coordinates sitting on the boundary at lam and about to
        # violate below it enter now, one at a time (tied kinks).
        if inactive.size:
            G_IS = gram[np.ix_(inactive, S)]
            c0 = (xty[inactive] - G_IS @ a) / n
            c1 = -(G_IS @ b) / n
            c_now = c0 + lam * c1
            sg = np.sign(c_now)
            at_edge = (np.abs(np.abs(c_now) - lam) <= _KINK_RTOL * lam) & (sg * c1 < 1.0 - _SLOPE_ATOL)
            if np.any(at_edge):
                j = int(inactive[np.flatnonzero(at_edge)[0]])
                log.info("tied kink at lambda=%.17g: entering %d", lam, j + 1)
                active[j] = int(sg[np.flatnonzero(at_edge)[0]])
                loop += 1
                path.events.append((loop, "insert", j, lam))
                continue

        cands = []  # (lambda, index, kind, sign)
        limit = lam * (1.0 - _KINK_RTOL)
        # kinks at roundoff level above zero are zero
        floor = 1e-12 * path.lambda0
        if inactive.size:
            for sigma in (1, -1):
                den = sigma - c1
                with np.errstate(divide="ignore", invalid="ignore"):
                    roots = np.where(np.abs(den) > _SLOPE_ATOL, c0 / den, -np.inf)
                for idx in np.flatnonzero((roots < limit) & (roots > floor)):
                    cands.append((float(roots[idx]), int(inactive[idx]), "insert", sigma))
        with np.errstate(divide="ignore", invalid="ignore"):
            droots = np.where(b != 0.0, -a / b, -np.inf)
        for idx in np.flatnonzero((droots < limit) & (droots > floor)):
            cands.append((float(droots[idx]), S[idx], "delete", 0))

        best = None
        if cands:
            best_lam = max(c[0] for c in cands)
            tied = [c for c in cands if c[0] >= best_lam - _KINK_RTOL * lam]
            best = min(tied, key=lambda c: c[1])
            if len({c[1] for c in tied}) > 1:
                log.info("tied kink at lambda=%.17g among %s; taking %d", best_lam,
                         sorted({c[1] + 1 for c in tied}), best[1] + 1)

        if best is None or best_lam <= min_lambda:
            _push_segment(path, cap, lam, min_lambda, S, s, a, b)
            path.status = "completed"
            return
        _push_segment(path, cap, lam, best_lam, S, s, a, b)
        _, j, kind, sigma = best
        loop += 1
        if kind == "insert":
            active[j] = sigma
        else:
            del active[j]
        path.events.append((loop, kind, j, best_lam))
        lam = best_lam
        if not active:
            corr = np.abs(xty) / n
            j = int(np.argmax(corr))
            active[j] = 1 if xty[j] > 0 else -1


def _insertion_only_path(problem, path, active, lam, min_lambda, cap):
    p, n = problem.p, problem.n
    gram, xty = problem.gram, problem.xty
    X, y = problem.X, problem.y
    loop = 1
    while True:
        S = sorted(active)
        s = np.array([active[j] for j in S], dtype=float)
        a, b = _affine_law(gram, xty, n, S, s)
        if len(S) == p:
            _push_segment(path, cap, lam, min_lambda, S, s, a, b)
            path.status = "completed"
            return
        loop += 1
        inactive, v = sign_relation_rhs(gram, S, s)
        on_edge = np.flatnonzero(np.abs(np.abs(v) - 1.0) <= _RHS_ATOL)
        if on_edge.size >= 2:
            path.status = "failed_insertion"
            path.diagnostic = {
                "loop": loop,
                "support": [j + 1 for j in S],
                "signs": [int(x) for x in s],
                "inactive": [int(j) + 1 for j in inactive],
                "rhs": v.tolist(),
                "boundary": [int(inactive[i]) + 1 for i in on_edge],
                "residual": float(np.max(np.abs(np.abs(v[on_edge]) - 1.0))),
                "lambda": lam,
                "reason": "%d inactive coordinates reach |sign| = 1 together; "
                          "no single insertion satisfies the sign relation" % on_edge.size,
            }
            return

        beta_ls = restricted_least_squares(X, y, S)
        corr = X[:, inactive].T @ (y - X @ beta_ls) / n
        k = int(np.argmax(np.abs(corr)))
        lam_next = float(abs(corr[k]))
        j = int(inactive[k])
        if lam_next <= min_lambda or lam_next == 0.0:
            _push_segment(path, cap, lam, min_lambda, S, s, a, b)
            path.status = "completed"
            return
        if lam_next >= lam:
            path.status = "failed_insertion"
            path.diagnostic = {
                "loop": loop,
                "support": [i + 1 for i in S],
                "candidate": j + 1,
                "lambda": lam,
                "lambda_candidate": lam_next,
                "residual": lam_next - lam,
                "reason": "next insertion level does not decrease lambda",
            }
            return
        _push_segment(path, cap, lam, lam_next, S, s, a, b)
        active[j] = 1 if corr[k] > 0 else -1
        path.events.append((loop, "insert", j, lam_next))
        lam = lam_next


def eval_path_at(path, lam):
    """Exact evaluation of the piecewise-linear path at ``lam``."""
    lam = float(lam)
    if lam >= path.lambda0:
        if lam > path.lambda0 * (1.0 + 1e-12) and path.segments:
            raise ValueError("lambda %g above the path start %g" % (lam, path.lambda0))
        return np.zeros(path.p)
    if lam < path.lambda_end or not path.segments:
        raise ValueError("lambda %g below the path end %g" % (lam, path.lambda_end))
    for seg in path.segments:
        if seg.lambda_lo <= lam <= seg.lambda_hi:
            return seg.beta(lam, path.p)
    raise ValueError("lambda %g not covered by the path" % lam)


@dataclass
class CounterExample:
    X: np.ndarray
    y: np.ndarray
    beta_star: np.ndarray
    alphas: np.ndarray
    true_support: tuple = (0, 1, 2)


def build_counter_example(p, n=None, alphas=None, betas=(200.0, 100.0, 1.0), seed=0):
    """Design on which support-enlarging path following breaks down.

    With an orthonormal basis ``(X_1, X_2, Z_3, ..., Z_p)`` (QR of a seeded
    Gaussian matrix), column ``j >= 3`` is
    ``alpha_j X_1 + (1 - alpha_j) X_2 + sqrt(1 - alpha_j^2 - (1 - alpha_j)^2) Z_j``
    and ``y = b1 X_1 + b2 X_2 + b3 X_3`` with no noise.  Every column has
    unit norm and, for ``S = {1, 2}``, the sign relation right-hand side is
    all ones.  ``alphas`` (length ``p - 2``) default to seeded uniforms on
    (0.1, 0.9).
    """
    if p < 4:
        raise ValueError("counter-example needs p >= 4")
    n = 2 * p if n is None else int(n)
    if n < p:
        raise ValueError("counter-example needs n >= p")
    b1, b2, b3 = (float(b) for b in betas)
    if not b1 > b2 > b3 > 0:
        raise ValueError("betas must satisfy b1 > b2 > b3 > 0")
    st = Stream(seed)
    Q, R = np.linalg.qr(st.normal(n * p).reshape(n, p))
    Q = Q * np.sign(np.diag(R))
    if alphas is None:
        alphas = 0.1 + 0.8 * st.uniform(p - 2)
    alphas = np.asarray(alphas, dtype=float)
    if alphas.shape != (p - 2,):
        raise DimensionError("need p - 2 = %d alphas" % (p - 2))
    if np.any((alphas <= 0) | (alphas >= 1)):
        raise ValueError("alphas must lie in (0, 1)")
    X = Q.copy()
    for j in range(2, p):
        a = alphas[j - 2]
        X[:, j] = a * Q[:, 0] + (1 - a) * Q[:, 1] + np.sqrt(1 - a * a - (1 - a) ** 2) * Q[:, j]
    beta = np.zeros(p)
    beta[:3] = (b1, b2, b3)
    return CounterExample(X, X @ beta, beta, alphas)


@dataclass
class CounterExampleReport:
    status: str
    loop_supports: list      # 1-based supports, one per loop before the failure
    loop_lambdas: list
    failed_loop: int
    rhs: np.ndarray
    rhs_deviation: float     # max |rhs_j - 1|
    oracle_support: list
    oracle_lambda: float
    true_support: list
    full_mode_supports: list
    full_mode_status: str
    diagnostic: dict

    def rows(self):
        j = lambda xs: ";".join(str(x) for x in xs)
        out = [("status", self.status), ("failed_loop", self.failed_loop)]
        for i, (S, lam) in enumerate(zip(self.loop_supports, self.loop_lambdas), 1):
            out.append(("loop_%d_support" % i, j(S)))
            out.append(("loop_%d_lambda" % i, "%.17g" % lam))
        out += [
            ("rhs", j("%.17g" % v for v in self.rhs)),
            ("rhs_max_abs_dev_from_one", "%.3e" % self.rhs_deviation),
            ("true_support", j(self.true_support)),
            ("oracle_lambda", "%.17g" % self.oracle_lambda),
            ("oracle_support", j(self.oracle_support)),
            ("full_mode_status", self.full_mode_status),
            ("full_mode_supports", " > ".join(j(S) for S in self.full_mode_supports)),
        ]
        return out


def reproduce_counter_example(seed=0, p=6, n=None, betas=(200.0, 100.0, 1.0)):
    """Run insertion-only path following on the counter-example and report.

    The report also carries the oracle support at ``1e-4 * lambda_max``
    and the supports visited by the exact (full-mode) homotopy for contrast.
    """
    from .problem import LassoProblem
    from .verify import oracle_solve

    ce = build_counter_example(p, n, betas=betas, seed=seed)
    prob = LassoProblem(ce.X, ce.y, 0.0)
    path = solve_path(prob, mode="insertion-only")
    loops = [seg.support.one_based() for seg in path.segments]
    lams = [seg.lambda_hi for seg in path.segments]
    diag = path.diagnostic or {}
    if path.status == "failed_insertion" and "support" in diag:
        loops.append(diag["support"])
        lams.append(path.lambda_end)
    rhs = np.asarray(diag.get("rhs", []), dtype=float)
    dev = float(np.max(np.abs(rhs - 1.0))) if rhs.size else float("nan")

    lam_small = 1e-4 * prob.lambda_max
    beta_hat = oracle_solve(prob.with_lambda(lam_small))
    oracle_support = [int(j) + 1 for j in np.flatnonzero(np.abs(beta_hat) > 1e-6)]

    full = solve_path(prob, mode="full")
    return CounterExampleReport(
        status=path.status,
        loop_supports=loops,
        loop_lambdas=lams,
        failed_loop=int(diag.get("loop", 0)),
        rhs=rhs,
        rhs_deviation=dev,
        oracle_support=oracle_support,
        oracle_lambda=lam_small,
        true_support=[j + 1 for j in ce.true_support],
        full_mode_supports=[seg.support.one_based() for seg in full.segments],
        full_mode_status=full.status,
        diagnostic=diag,
    )


@dataclass
class LarsPath:
    order: list             # entering variables, 0-based
    coefs: np.ndarray       # (steps + 1, p); row 0 is all zeros
    max_corr: np.ndarray    # max |X_j'r| at each row
    signs: list

    def beta_at_corr(self, C):
        """Coefficients where the maximal absolute correlation equals ``C``."""
        if C >= self.max_corr[0]:
            return self.coefs[0].copy()
        if C <= self.max_corr[-1]:
            return self.coefs[-1].copy()
        i = int(np.flatnonzero(self.max_corr >= C)[-1])
        c_hi, c_lo = self.max_corr[i], self.max_corr[i + 1]
        t = (c_hi - C) / (c_hi - c_lo)
        return (1 - t) * self.coefs[i] + t * self.coefs[i + 1]


def solve_lars(X, y, tie_rtol=1e-10):
    """Least angle regression (no Lasso modification: variables never leave).

    Starting from zero, repeatedly move the active coefficients along the
    equiangular direction (the joint least-squares direction that keeps all
    active correlations equal) until an inactive predictor's absolute
    correlation with the residual catches up, then add it.  After the last
    variable enters the step runs to the least-squares fit.

    Columns must have unit norm.  Exact ties in the entering correlations
    raise ``AmbiguityError``; a rank-deficient active set raises
    ``SingularSupportError``.
    """
    X = as_matrix(X, "X")
    n, p = X.shape
    y = as_vector(y, n, "y")
    norms = np.linalg.norm(X, axis=0)
    if not np.allclose(norms, 1.0, atol=1e-8):
        raise ValueError("solve_lars needs unit-norm columns")

    beta = np.zeros(p)
    mu = np.zeros(n)
    c = X.T @ y
    C = float(np.max(np.abs(c))) if p else 0.0
    coefs, corrs, order, signs = [beta.copy()], [C], [], []
    if C == 0.0:
        return LarsPath(order, np.array(coefs), np.array(corrs), signs)

    top = np.flatnonzero(np.abs(np.abs(c) - C) <= tie_rtol * C)
    if top.size > 1:
        raise AmbiguityError("tie in entering correlations: %s" % [int(j) + 1 for j in top])
    active = [int(top[0])]
    order.append(active[0])
    signs.append(int(np.sign(c[active[0]])))
    max_steps = min(p, n)

    while True:
        A = active
        s = np.sign(c[A])
        XA = X[:, A] * s
        GA = XA.T @ XA
        try:
            cf = _cholesky(GA, A)
        except SingularSupportError:
            raise SingularSupportError(A) from None
        g1 = scipy.linalg.cho_solve(cf, np.ones(len(A)), check_finite=False)
        AA = 1.0 / np.sqrt(float(np.sum(g1)))
        w = AA * g1
        u = XA @ w
        a = X.T @ u

        inactive = [j for j in range(p) if j not in A]
        gamma, nxt = C / AA, None
        if len(A) < max_steps:
            cands = []
            for j in inactive:
                for num, den in ((C - c[j], AA - a[j]), (C + c[j], AA + a[j])):
                    if den > 0:
                        g = num / den
                        if g > tie_rtol * C / AA:
                            cands.append((g, j))
            if cands:
                cands.sort()
                g_best = cands[0][0]
                if g_best < gamma:
                    tied = {j for g, j in cands if g - g_best <= tie_rtol * max(g_best, 1e-300)}
                    if len(tied) > 1:
                        raise AmbiguityError("tie in entering correlations: %s"
                                             % sorted(j + 1 for j in tied))
                    gamma, nxt = g_best, cands[0][1]

        mu = mu + gamma * u
        beta = beta.copy()
        beta[A] += gamma * s * w
        c = X.T @ (y - mu)
        C = max(C - gamma * AA, 0.0)
        coefs.append(beta.copy())
        corrs.append(C)
        if nxt is None:
            break
        active = active + [nxt]
        order.append(nxt)
        signs.append(int(np.sign(c[nxt])))
    return LarsPath(order, np.array(coefs), np.array(corrs), signs)
