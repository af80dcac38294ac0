"""Matplotlib rendering for the experiment reports.

Figures are written to files next to the delimited output; rendering uses
the Agg backend so it works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = {
    "optimized": dict(color="#1f5fbf", marker="o", linestyle="-"),
    "uniform": dict(color="#c03030", marker="s", linestyle="--"),
}
_FLOOR = 1e-20  # keep log-scale plots finite when a fit is exact


def render_risk_curves(summary, path) -> None:
    """Mean empirical risk vs. sample count, one errorbar line per method."""
    methods = sorted({s.method for s in summary})
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for method in methods:
        rows = sorted((s for s in summary if s.method == method), key=lambda s: s.n)
        n = np.array([s.n for s in rows])
        mean = np.maximum([s.mean_risk for s in rows], _FLOOR)
        std = np.array([s.std_risk for s in rows])
        lower = np.maximum(mean - std, _FLOOR * 0.5)
        style = _STYLE.get(method, {})
        ax.errorbar(
            n,
            mean,
            yerr=[mean - lower, std],
            label=method,
            markersize=3.5,
            linewidth=1.2,
            capsize=2,
            **style,
        )
    ax.set_yscale("log")
    ax.set_xlabel("number of sampled nodes N")
    ax.set_ylabel("empirical risk")
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_distribution(probs, p: int, d: int, path) -> None:
    """Heatmap of the node-sampling distribution (d = 1), else a rank plot."""
    fig, ax = plt.subplots(figsize=(5.6, 4.6))
    probs = np.asarray(probs, dtype=np.float64)
    if d == 1:
        grid = probs.reshape(p, p)  # rows b, columns a
        im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis")
        ax.set_xlabel("a")
        ax.set_ylabel("b")
        fig.colorbar(im, ax=ax, label="probability")
    else:
        ranked = np.sort(probs)[::-1]
        ax.semilogy(np.arange(1, ranked.size + 1), np.maximum(ranked, _FLOOR))
        ax.set_xlabel("node rank")
        ax.set_ylabel("probability")
        ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
