"""Figure rendering for the report paths (simulation metrics, timing, ELBO)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_METRIC_LABELS = [
    ("mse", "MSE"),
    ("mspe", "MSPE"),
    ("coverage", "Coverage"),
    ("rand_index", "RAND index"),
    ("auc_pr", "AUC-PR"),
]


def save_metric_figure(reports: list, path) -> None:
    """Boxplots of each available metric, grouped by method."""
    methods = sorted({r["method"] for r in reports})
    metrics = [(key, label) for key, label in _METRIC_LABELS
               if any(r.get(key) is not None for r in reports)]
    fig, axes = plt.subplots(1, len(metrics), figsize=(4.0 * len(metrics), 4.5), squeeze=False)
    for ax, (key, label) in zip(axes[0], metrics):
        data = [[r[key] for r in reports if r["method"] == m and r.get(key) is not None]
                for m in methods]
        ax.boxplot(data, tick_labels=methods)
        ax.set_ylabel(label)
        ax.tick_params(axis="x", rotation=60)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_timing_figure(rows: list, path) -> None:
    """Mean wall-clock time against the varied dimension, one line per method."""
    methods = sorted({r["method"] for r in rows})
    vary = rows[0]["vary"] if rows else "P"
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for method in methods:
        points = {}
        for r in rows:
            if r["method"] == method:
                points.setdefault(r["value"], []).append(r["seconds"])
        xs = sorted(points)
        ys = [float(np.mean(points[x])) for x in xs]
        ax.plot(xs, ys, marker="o", label=method)
    ax.set_xlabel(vary)
    ax.set_ylabel("seconds")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.grid(alpha=0.3, which="both")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_elbo_figure(elbo: np.ndarray, path) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    ax.plot(np.arange(1, len(elbo) + 1), elbo)
    ax.set_xlabel("iteration")
    ax.set_ylabel("ELBO")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
