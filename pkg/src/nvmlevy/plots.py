"""File-output figure rendering for the report commands.

Figures are rendered with the Agg backend and stripped metadata so that
reruns with the same seed produce byte-identical PNG files.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 120, "metadata": {"Software": None}}


def _new_axes(xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return fig, ax


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_paths_figure(paths, path, ylabel="value"):
    """Staircase plot of up to ten (times, cumulative values) pairs."""
    fig, ax = _new_axes("t", ylabel)
    for times, values in paths[:10]:
        order = np.argsort(times, kind="stable")
        t = np.concatenate([[0.0], times[order]])
        y = np.concatenate([[0.0], np.cumsum(values[order])])
        ax.step(t, y, where="post", linewidth=1.0)
    _finish(fig, path)


def save_state_paths_figure(grids, states, path):
    """Component-wise state trajectories for up to ten replicas."""
    fig, ax = _new_axes("t", "state")
    for grid, traj in list(zip(grids, states))[:10]:
        for j in range(traj.shape[1]):
            ax.plot(grid, traj[:, j], linewidth=1.0)
    _finish(fig, path)


def save_histogram_figure(samples, path, overlay_normal=True, bins=80):
    fig, ax = _new_axes("value", "density")
    ax.hist(samples, bins=bins, density=True, alpha=0.75)
    if overlay_normal:
        lo, hi = min(-4.0, np.min(samples)), max(4.0, np.max(samples))
        grid = np.linspace(lo, hi, 400)
        ax.plot(grid, np.exp(-0.5 * grid**2) / math.sqrt(2.0 * math.pi), linewidth=1.5)
    _finish(fig, path)


def save_qq_figure(points, path, xlabel="sample quantiles", ylabel="reference quantiles"):
    pts = np.asarray(points, dtype=float)
    fig, ax = _new_axes(xlabel, ylabel)
    ax.plot(pts[:, 1], pts[:, 0], "o", markersize=2.5)
    lo = float(min(pts.min(), -1.0))
    hi = float(max(pts.max(), 1.0))
    ax.plot([lo, hi], [lo, hi], linewidth=1.0)
    _finish(fig, path)


def save_bound_curve_figure(points, path):
    pts = np.asarray(points, dtype=float)
    fig, ax = _new_axes("truncation level", "distance bound")
    ax.loglog(pts[:, 0], pts[:, 1], "o-", markersize=3, label="bound")
    ax.loglog(pts[:, 0], pts[:, 2], "--", label="leading asymptote")
    ax.legend()
    _finish(fig, path)


def save_trace_figure(trace, path, ylabel="ratio"):
    pts = np.asarray(trace, dtype=float)
    fig, ax = _new_axes("truncation level", ylabel)
    ax.semilogx(pts[:, 0], pts[:, 1], "o-", markersize=3)
    _finish(fig, path)
