"""Lasso solvers with a convergence-bound verification harness.

Solvers: ISTA, FISTA, cyclic coordinate descent, an accelerated method on a
softplus-smoothed penalty, exact homotopy path following and LARS.
"""

from .datagen import GenSpec, gen_linear, standardize_columns
from .descent import IterateTrace, MomentumSchedule, StepRule, prox_l1, run_agd, run_gd
from .errors import (AmbiguityError, BoundPairingError, ConvergenceError, DegenerateColumnError,
                     DegenerateProblemError, DimensionError, DivergenceError, LassoError,
                     LineSearchError, OracleUnstableError, PathOverflowError, PathSingularityError,
                     SingularSupportError, SymmetryError)
from .linalg import restricted_least_squares, restricted_solve, sigma_max
from .pathwise import (build_counter_example, eval_path_at, lambda_max, reproduce_counter_example,
                       solve_lars, solve_path)
from .problem import (LassoProblem, SurrogateParams, grad_smooth, kkt_residual, objective,
                      soft_threshold, surrogate_gap_bound, surrogate_grad, surrogate_objective,
                      surrogate_phi)
from .solvers import SolverConfig, run_solver, solve_cgda, solve_fista, solve_ista, solve_sla
from .verify import bench_run, bound_rhs, check_bound, check_lemma_bound, oracle_solve

__version__ = "0.1.0"
