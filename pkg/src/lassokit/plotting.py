"""Figures rendered next to the CSV reports.

Figures are drawn on ``matplotlib.figure.Figure`` objects with the Agg
canvas, so nothing here touches pyplot's global state or needs a display.
The output format follows the file suffix (png, pdf, svg, ...).
"""

import numpy as np
from matplotlib.figure import Figure

__all__ = ["plot_convergence", "plot_surrogate", "plot_path"]

_STYLE = {"ista": "C0", "fista": "C1", "cgda": "C2", "sla": "C3"}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def plot_convergence(result, path, title=None):
    """Optimality gap against iteration on log-log axes, bounds dashed.

    Parameters
    ----------
    result : BenchResult
    path : str or Path
        Output file.
    """
    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot()
    for name, sb in result.solvers.items():
        ks = np.asarray(sb.trace.ks)
        gaps = np.asarray(sb.trace.objectives) - result.f_hat
        keep = (ks >= 1) & (gaps > 0)
        color = _STYLE.get(name)
        ax.loglog(ks[keep], gaps[keep], color=color, label=name)
        if sb.bound is not None:
            ax.loglog(sb.bound.ks, sb.bound.rhs, color=color, ls="--", lw=0.8)
    ax.set_xlabel("iteration k")
    ax.set_ylabel(r"$F(\beta^{(k)}) - F(\hat\beta)$")
    ax.legend(title="solid: gap, dashed: bound", fontsize=8)
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_surrogate(x, columns, path):
    """``|x|`` and its softplus approximations.

    ``columns`` maps a label to an array of values over ``x``.
    """
    fig = Figure(figsize=(5.6, 4.2))
    ax = fig.add_subplot()
    for label, values in columns.items():
        ax.plot(x, values, label=label, lw=1.8 if label == "|x|" else 1.2)
    ax.set_xlabel("x")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_path(reg_path, path, names=None, points=200):
    """Coefficient profiles along a piecewise-linear path, kinks marked."""
    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot()
    p = reg_path.p
    rows, lams = [], []
    for seg in reg_path.segments:
        for lam in np.linspace(seg.lambda_hi, seg.lambda_lo, max(2, points // max(1, len(reg_path.segments)))):
            lams.append(lam)
            rows.append(seg.beta(lam, p))
    if rows:
        B = np.array(rows)
        for j in range(p):
            if np.any(B[:, j] != 0):
                ax.plot(lams, B[:, j], lw=1.0, label=names[j] if names else "x%d" % (j + 1))
        for lam in reg_path.kinks:
            ax.axvline(lam, color="0.85", lw=0.6, zorder=0)
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel("coefficient")
    if p <= 12 and rows:
        ax.legend(fontsize=7, ncol=2)
    if reg_path.status != "completed":
        ax.set_title("stopped: %s" % reg_path.status)
    return _save(fig, path)
