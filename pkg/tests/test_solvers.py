import numpy as np
import pytest

from conftest import corpus_oracle, corpus_problem
from lassokit.datagen import Stream
from lassokit.errors import DegenerateColumnError, DegenerateProblemError
from lassokit.problem import LassoProblem, SurrogateParams, soft_threshold, surrogate_gap_bound
from lassokit.solvers import SolverConfig, run_solver, solve_cgda, solve_fista, solve_ista, solve_sla

IDENTITY_Y = np.array([3.0, -0.5, -3.0, 1.25])


def identity_problem(lam=0.25):
    return LassoProblem(np.eye(IDENTITY_Y.size), IDENTITY_Y, lam)


def test_cgda_identity_bitwise():
    pr = identity_problem()
    tr = solve_cgda(pr, cfg=SolverConfig(5, 0.0))
    assert np.array_equal(tr.iterates[1], soft_threshold(IDENTITY_Y, pr.n * pr.lam))
    tr = solve_cgda(pr, x0=Stream(0).normal(4), cfg=SolverConfig(5, 0.0))
    assert np.array_equal(tr.iterates[1], soft_threshold(IDENTITY_Y, pr.n * pr.lam))


@pytest.mark.parametrize("solver", [solve_ista, solve_fista])
def test_prox_gradient_identity_one_step(solver):
    pr = identity_problem()
    x0 = Stream(1).normal(4)
    tr = solver(pr, x0=x0, cfg=SolverConfig(3, 0.0))
    np.testing.assert_allclose(tr.iterates[1], soft_threshold(IDENTITY_Y, pr.n * pr.lam), rtol=0, atol=1e-14)


@pytest.mark.parametrize("name", ["ista", "fista", "cgda", "sla"])
def test_above_lambda_max_gives_zero(name):
    pr = corpus_problem(0)
    pr = pr.with_lambda(pr.lambda_max * 1.0001)
    tr = run_solver(name, pr, SolverConfig(50, 1e-12), alpha=200.0)
    if name == "sla":
        # smoothing keeps beta slightly off zero; the objective stays within the surrogate allowance
        f0 = pr.y @ pr.y / (2 * pr.n)
        assert tr.objectives[-1] - f0 <= surrogate_gap_bound(pr.p, pr.lam, SurrogateParams(200.0))
    else:
        assert np.array_equal(tr.final, np.zeros(pr.p))
        assert tr.converged and tr.iterations == 0


def test_ista_one_iteration_fixed_point_at_lambda_max():
    pr = corpus_problem(1)
    pr = pr.with_lambda(pr.lambda_max)
    tr = solve_ista(pr, cfg=SolverConfig(1, 0.0))
    assert np.array_equal(tr.final, np.zeros(pr.p))


def test_ista_update_is_thresholded_gradient_step():
    pr = corpus_problem(2)
    tr = solve_ista(pr, cfg=SolverConfig(3, 0.0))
    b = tr.iterates[1]
    expected = soft_threshold(b - (pr.X.T @ (pr.X @ b) - pr.X.T @ pr.y) / (pr.n * pr.L), pr.lam / pr.L)
    np.testing.assert_allclose(tr.iterates[2], expected, atol=1e-12)


def test_cgda_single_coordinate():
    X = Stream(3).normal(10).reshape(10, 1)
    y = Stream(4).normal(10)
    pr = LassoProblem(X, y, 0.05)
    tr = solve_cgda(pr, cfg=SolverConfig(1, 0.0))
    expected = soft_threshold(X[:, 0] @ y, 10 * 0.05) / (X[:, 0] @ X[:, 0])
    assert tr.final[0] == pytest.approx(expected, rel=1e-14)


def test_cgda_orthogonal_design_one_sweep():
    Q, _ = np.linalg.qr(Stream(5).normal(60).reshape(12, 5))
    X = Q * np.array([1.0, 2.0, 0.5, 3.0, 1.5])
    y = Stream(6).normal(12)
    pr = LassoProblem(X, y, 0.02)
    tr = solve_cgda(pr, cfg=SolverConfig(1, 0.0))
    closed = soft_threshold(X.T @ y, 12 * 0.02) / np.sum(X * X, axis=0)
    np.testing.assert_allclose(tr.final, closed, atol=1e-12)


def test_cgda_zero_column():
    X = Stream(7).normal(30).reshape(10, 3)
    X[:, 1] = 0
    with pytest.raises(DegenerateColumnError) as info:
        solve_cgda(LassoProblem(X, np.ones(10), 0.1))
    assert info.value.column == 1


def test_cgda_jacobi_mode_runs():
    pr = corpus_problem(3)
    tr = solve_cgda(pr, cfg=SolverConfig(20, 0.0), sweep="jacobi")
    assert tr.info["sweep"] == "jacobi" and len(tr.ks) == 21
    with pytest.raises(ValueError):
        solve_cgda(pr, sweep="random")


def test_zero_design():
    pr = LassoProblem(np.zeros((5, 2)), np.ones(5), 0.1)
    assert np.array_equal(solve_ista(pr).final, np.zeros(2))
    with pytest.raises(DegenerateProblemError):
        solve_fista(LassoProblem(np.zeros((5, 2)), np.ones(5), 0.0))


@pytest.mark.parametrize("seed", [0, 4, 11])
def test_solvers_agree_with_oracle(seed):
    pr = corpus_problem(seed)
    f_hat = pr.objective_from_gram(corpus_oracle(seed), pr.gram @ corpus_oracle(seed))
    for name in ("ista", "fista", "cgda"):
        tr = run_solver(name, pr, SolverConfig(20_000, 1e-10))
        assert tr.converged
        assert abs(tr.objectives[-1] - f_hat) <= 1e-6
    sla = solve_sla(pr, SurrogateParams(200.0), cfg=SolverConfig(20_000, 1e-12))
    allowance = surrogate_gap_bound(pr.p, pr.lam, SurrogateParams(200.0))
    assert abs(sla.objectives[-1] - f_hat) <= allowance + 1e-6


def test_fista_and_cgda_coefficients_agree():
    pr = corpus_problem(6)
    a = solve_fista(pr, cfg=SolverConfig(20_000, 1e-11)).final
    b = solve_cgda(pr, cfg=SolverConfig(20_000, 1e-11)).final
    np.testing.assert_allclose(a, b, atol=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_ista_monotone(seed):
    objs = solve_ista(corpus_problem(seed), cfg=SolverConfig(500, 0.0)).objectives
    assert np.all(np.diff(objs) <= 1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_cgda_monotone(seed):
    objs = solve_cgda(corpus_problem(seed), cfg=SolverConfig(200, 0.0)).objectives
    assert np.all(np.diff(objs) <= 1e-12)


def test_fista_not_monotone_somewhere():
    increases = [np.max(np.diff(solve_fista(corpus_problem(s), cfg=SolverConfig(300, 0.0)).objectives))
                 for s in range(3)]
    assert max(increases) > 1e-12


def test_sla_records_both_objectives():
    pr = corpus_problem(7)
    prm = SurrogateParams(20.0)
    tr = solve_sla(pr, prm, cfg=SolverConfig(30, 0.0))
    assert len(tr.surrogate) == len(tr.objectives) == 31
    bound = surrogate_gap_bound(pr.p, pr.lam, prm)
    gaps = np.asarray(tr.surrogate) - np.asarray(tr.objectives)
    assert np.all(gaps >= -1e-12) and np.all(gaps <= bound + 1e-12)


def test_sla_continuation_warm_starts():
    pr = corpus_problem(8)
    tr = solve_sla(pr, SurrogateParams(200.0), cfg=SolverConfig(3000, 1e-10), continuation=2)
    assert tr.info["continuation"] == 2
    assert tr.converged


def test_record_every_thins_trace():
    tr = solve_ista(corpus_problem(9), cfg=SolverConfig(100, 0.0, record_every=10))
    assert tr.ks == [0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100]


def test_max_iters_status():
    tr = solve_fista(corpus_problem(9), cfg=SolverConfig(3, 1e-12))
    assert not tr.converged and tr.info["status"] == "max_iters"


def test_run_solver_dispatch_errors():
    pr = corpus_problem(0)
    with pytest.raises(ValueError):
        run_solver("newton", pr)
    with pytest.raises(ValueError):
        run_solver("sla", pr)


def test_solvers_never_touch_x():
    # the loops run on cached X'X and X'y only, so poisoning X after
    # construction changes nothing
    base = corpus_problem(10)
    pr = LassoProblem(base.X.copy(), base.y.copy(), base.lam)
    ref = solve_fista(pr, cfg=SolverConfig(50, 0.0)).final
    object.__setattr__(pr, "X", None)
    for name in ("ista", "fista", "cgda", "sla"):
        run_solver(name, pr, SolverConfig(50, 0.0), alpha=50.0)
    assert np.array_equal(solve_fista(pr, cfg=SolverConfig(50, 0.0)).final, ref)
