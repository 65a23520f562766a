"""Command-line interface: ``lassokit {fit,path,bench,gen,repro}``.

Exit codes
----------
0  success (fit: converged)
1  input error (bad CSV, bad flags, numerical failure)
2  fit stopped at --max-iters; coefficients are still written
3  path stopped with status failed_insertion
4  bench --check-bounds found a violated bound
"""

import argparse
import csv
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from .datagen import GenSpec, gen_linear
from .errors import LassoError
from .pathwise import (build_counter_example, eval_path_at, reproduce_counter_example, solve_lars,
                       solve_path)
from .problem import LassoProblem, SurrogateParams, kkt_residual, objective, surrogate_phi
from .solvers import SOLVERS, SolverConfig, run_solver
from .verify import bench_run

EXIT_OK, EXIT_INPUT, EXIT_MAX_ITERS, EXIT_PATH_FAILED, EXIT_BOUND = 0, 1, 2, 3, 4

ALGOS = ("ista", "fista", "cgda", "sla", "pfa", "lars")


class InputError(Exception):
    pass


def fmt(x):
    return "%.17g" % x


def read_dataset(path):
    """Read a CSV with a header row; the column named ``y`` is the response.

    Returns ``(X, y, names)`` where ``names`` are the predictor headers in
    file order.  Problems are reported with their 1-based line number.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc.strerror)) from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise InputError("%s: line 1: missing header row" % path)
        header = [h.strip() for h in header]
        if header.count("y") != 1:
            raise InputError("%s: line 1: need exactly one column named 'y'" % path)
        if len(header) < 2:
            raise InputError("%s: line 1: need at least one predictor column" % path)
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError("%s: line %d: expected %d fields, got %d" % (path, line, len(header), len(row)))
            try:
                vals = [float(c) for c in row]
            except ValueError:
                bad = next(c for c in row if not _is_float(c))
                raise InputError("%s: line %d: not a number: %r" % (path, line, bad)) from None
            if not all(math.isfinite(v) for v in vals):
                raise InputError("%s: line %d: non-finite value" % (path, line))
            rows.append(vals)
    if not rows:
        raise InputError("%s: no data rows" % path)
    data = np.array(rows)
    iy = header.index("y")
    names = [h for i, h in enumerate(header) if i != iy]
    return np.delete(data, iy, axis=1), data[:, iy].copy(), names


def _is_float(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def write_dataset(path, X, y, names=None):
    names = names or ["x%d" % (j + 1) for j in range(X.shape[1])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(names) + ["y"])
        for xi, yi in zip(X, y):
            w.writerow([fmt(v) for v in xi] + [fmt(yi)])


def _write_trace(path, trace):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "objective", "kkt", "elapsed_ns"])
        for k, obj, kkt, ns in zip(trace.ks, trace.objectives, trace.kkt, trace.elapsed_ns):
            w.writerow([k, fmt(obj), fmt(kkt), ns])


def _lars_at_lambda(X, y, lam):
    # LARS on unit-norm columns, read off where max |x_j'r| / n = lam,
    # then mapped back to the original column scale
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0):
        raise InputError("lars needs nonzero columns")
    lp = solve_lars(X / norms, y)
    return lp.beta_at_corr(X.shape[0] * lam) / norms


def cmd_fit(args):
    X, y, names = read_dataset(args.data)
    if args.algo == "sla" and args.alpha is None:
        raise InputError("--algo sla needs --alpha")
    problem = LassoProblem(X, y, args.lam)
    status = EXIT_OK
    if args.algo in SOLVERS:
        cfg = SolverConfig(max_iters=args.max_iters, gap_tol=args.tol)
        trace = run_solver(args.algo, problem, cfg, alpha=args.alpha)
        beta = trace.final
        if not trace.converged:
            status = EXIT_MAX_ITERS
            logging.warning("%s stopped after %d iterations without reaching tol %g",
                            args.algo, trace.iterations, args.tol)
    else:
        t0 = time.perf_counter_ns()
        if args.algo == "pfa":
            path = solve_path(problem, min_lambda=min(args.lam, problem.lambda_max))
            beta = eval_path_at(path, args.lam)
        else:
            beta = _lars_at_lambda(X, y, args.lam)
        trace = None
        elapsed = time.perf_counter_ns() - t0
    if args.trace:
        if trace is None:
            from .descent import IterateTrace
            trace = IterateTrace(args.algo, np.zeros(problem.p))
            trace.record(0, beta, objective(problem, beta), kkt_residual(problem, beta), elapsed)
        _write_trace(args.trace, trace)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["feature", "coefficient"])
    for name, b in zip(names, beta):
        w.writerow([name, fmt(b)])
    return status


def _write_path(out, path):
    width = max((len(s.support) for s in path.segments), default=0)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        head = ["seg", "lambda_hi", "lambda_lo", "support"]
        for i in range(1, width + 1):
            head += ["intercept_%d" % i, "slope_%d" % i]
        w.writerow(head)
        for i, seg in enumerate(path.segments, 1):
            row = [i, fmt(seg.lambda_hi), fmt(seg.lambda_lo), ";".join(map(str, seg.support.one_based()))]
            for a, b in zip(seg.intercept, seg.slope):
                row += [fmt(a), fmt(b)]
            w.writerow(row + [""] * (len(head) - len(row)))


def _diag_value(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(fmt(x) if isinstance(x, float) else str(x) for x in v)
    return fmt(v) if isinstance(v, float) else str(v)


def cmd_path(args):
    X, y, names = read_dataset(args.data)
    problem = LassoProblem(X, y, 0.0)
    path = solve_path(problem, min_lambda=args.min_lambda, mode=args.mode)
    _write_path(args.out, path)
    if args.figure:
        from .plotting import plot_path
        plot_path(path, args.figure, names)
    if path.status == "failed_insertion":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["diagnostic", "value"])
        w.writerow(["status", path.status])
        for key, val in path.diagnostic.items():
            w.writerow([key, _diag_value(val)])
        return EXIT_PATH_FAILED
    return EXIT_OK


def _bench_table(result, out):
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algo", "k", "objective", "gap", "bound_rhs"])
        for algo, k, obj, gap, rhs in result.rows():
            w.writerow([algo, k, fmt(obj), fmt(gap), fmt(rhs)])


def _bench_summary(result):
    w = csv.writer(sys.stdout, lineterminator="\n")
    head = ["algo"] + ["iters_to_%g" % t for t in result.targets] + ["wall_s", "final_kkt", "verdict", "min_slack"]
    w.writerow(head)
    for name, sb in result.solvers.items():
        row = [name] + ["" if sb.iters_to[t] is None else sb.iters_to[t] for t in result.targets]
        row += ["%.4f" % sb.wall_s, "%.3e" % sb.final_kkt]
        row += [sb.bound.verdict, "%.3e" % sb.bound.min_slack] if sb.bound else ["", ""]
        w.writerow(row)


def cmd_bench(args):
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    unknown = [a for a in algos if a not in SOLVERS]
    if unknown or not algos:
        raise InputError("unknown algorithm(s): %s (choose from %s)" % (",".join(unknown) or "none given",
                                                                       ",".join(SOLVERS)))
    X, y, _ = read_dataset(args.data)
    problem = LassoProblem(X, y, args.lam)
    cfg = SolverConfig(max_iters=args.iters, gap_tol=0.0)
    result = bench_run(problem, algos, cfg, alpha=args.alpha, step_scale=args.step_scale,
                       check_bounds=args.check_bounds)
    _bench_table(result, args.out)
    _bench_summary(result)
    if args.figure:
        from .plotting import plot_convergence
        plot_convergence(result, args.figure)
    if args.check_bounds and not result.all_bounds_hold:
        return EXIT_BOUND
    return EXIT_OK


def truth_path(out):
    """Sidecar file holding the true coefficients: ``data.csv -> data.truth.csv``."""
    return Path(out).with_suffix(".truth.csv")


def cmd_gen(args):
    if args.preset == "random":
        spec = GenSpec(args.n, args.p, sparsity=args.sparsity, sigma=args.sigma, seed=args.seed)
        X, y, beta = gen_linear(spec)
        support = set(np.flatnonzero(beta).tolist())
    else:
        ce = build_counter_example(args.p, args.n, seed=args.seed)
        X, y, beta = ce.X, ce.y, ce.beta_star
        support = set(ce.true_support)
    write_dataset(args.out, X, y)
    with open(truth_path(args.out), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["feature", "beta_star", "in_support"])
        for j, b in enumerate(beta):
            w.writerow(["x%d" % (j + 1), fmt(b), int(j in support)])
    return EXIT_OK


# standard instance for the convergence report
STANDARD = dict(n=100, p=50, seed=7, lam_ratio=0.1, iters=1000, alpha=200.0)


def _repro_surrogate(args, out):
    x = np.arange(-60, 61) / 20.0
    cols = {"|x|": np.abs(x)}
    for a in (1, 5, 20):
        cols["phi_%d" % a] = surrogate_phi(x, SurrogateParams(float(a)))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x", "abs"] + [k for k in cols if k != "|x|"])
    for i, xi in enumerate(x):
        w.writerow([fmt(xi)] + [fmt(v[i]) for v in cols.values()])
    if args.figure:
        from .plotting import plot_surrogate
        plot_surrogate(x, cols, args.figure)
    return EXIT_OK


def _repro_convergence(args, out):
    s = STANDARD
    X, y, _ = gen_linear(GenSpec(s["n"], s["p"], seed=s["seed"]))
    base = LassoProblem(X, y, 0.0)
    problem = base.with_lambda(s["lam_ratio"] * base.lambda_max)
    result = bench_run(problem, ["ista", "fista", "cgda", "sla"],
                       SolverConfig(max_iters=s["iters"], gap_tol=0.0), alpha=s["alpha"])
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["algo", "k", "objective", "gap", "bound_rhs"])
    for algo, k, obj, gap, rhs in result.rows():
        w.writerow([algo, k, fmt(obj), fmt(gap), fmt(rhs)])
    for name, sb in result.solvers.items():
        logging.info("%s: %s (min slack %.3e)", name, sb.bound.verdict, sb.bound.min_slack)
    if args.figure:
        from .plotting import plot_convergence
        plot_convergence(result, args.figure, title="n=%d, p=%d, seed %d" % (s["n"], s["p"], s["seed"]))
    return EXIT_OK if result.all_bounds_hold else EXIT_BOUND


def _repro_counterexample(args, out):
    report = reproduce_counter_example(seed=args.seed, p=args.p)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["key", "value"])
    for key, val in report.rows():
        w.writerow([key, val])
    if args.figure:
        from .plotting import plot_path
        ce = build_counter_example(args.p, seed=args.seed)
        plot_path(solve_path(LassoProblem(ce.X, ce.y, 0.0)), args.figure)
    return EXIT_OK


def cmd_repro(args):
    run = {"surrogate": _repro_surrogate, "convergence": _repro_convergence,
           "counterexample": _repro_counterexample}[args.paper_figure]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            return run(args, fh)
    return run(args, sys.stdout)


def build_parser():
    ap = argparse.ArgumentParser(prog="lassokit", description="Lasso solvers, paths and bound checks.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit one lambda and print coefficients")
    p.add_argument("--data", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--algo", choices=ALGOS, required=True)
    p.add_argument("--alpha", type=float, help="surrogate sharpness (required for sla)")
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-8, help="stopping residual")
    p.add_argument("--trace", help="write k,objective,kkt,elapsed_ns here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("path", help="compute the piecewise-linear path")
    p.add_argument("--data", required=True)
    p.add_argument("--min-lambda", type=float, default=0.0)
    p.add_argument("--mode", choices=("full", "insertion-only"), default="full")
    p.add_argument("--out", required=True)
    p.add_argument("--figure", help="also draw coefficient profiles to this image file")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("bench", help="run solvers and compare with the convergence bounds")
    p.add_argument("--data", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--algos", required=True, help="comma-separated, e.g. ista,fista,cgda,sla")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.add_argument("--check-bounds", action="store_true")
    p.add_argument("--alpha", type=float, default=200.0, help="surrogate sharpness for sla")
    p.add_argument("--step-scale", type=float, default=1.0,
                   help="multiply the ista/fista step 1/L (values above 2 break the bounds)")
    p.add_argument("--figure", help="also draw gap-vs-k to this image file")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a synthetic dataset and its true coefficients")
    p.add_argument("--preset", choices=("random", "counterexample"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--sparsity", type=int, default=5)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("repro", help="emit plot-ready data for the standard figures")
    p.add_argument("--paper-figure", choices=("convergence", "counterexample", "surrogate"), required=True)
    p.add_argument("--out", help="CSV destination (default stdout)")
    p.add_argument("--figure", help="also render the figure to this image file")
    p.add_argument("--seed", type=int, default=0, help="counterexample seed")
    p.add_argument("--p", type=int, default=6, help="counterexample dimension")
    p.set_defaults(func=cmd_repro)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; here 2 means max-iters
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, LassoError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
