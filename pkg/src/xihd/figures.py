"""Figure rendering for the report path.

Each renderer writes a PNG next to the delimited/JSON output the CLI already
produces.  Rendering is strictly additive diagnostics -- nothing numeric in
any report depends on matplotlib.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .coeff import XiMatrix
from .data import DataMatrix


def save_xi_heatmap(xi: XiMatrix, path, labels=None) -> None:
    """Heat map of |xi_kl| with the diagonal masked out."""
    vals = np.abs(xi.values)
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    im = ax.imshow(np.ma.masked_invalid(vals), cmap="viridis", vmin=0.0,
                   interpolation="nearest")
    fig.colorbar(im, ax=ax, label="|coefficient|")
    ax.set_xlabel("target column l")
    ax.set_ylabel("conditioning column k")
    ax.set_title(f"pairwise coefficient magnitudes (n={xi.n}, p={xi.p})")
    if labels is not None and len(labels) <= 25:
        ticks = range(len(labels))
        ax.set_xticks(ticks, labels, rotation=90, fontsize=7)
        ax.set_yticks(ticks, labels, fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_screened_pairs(data: DataMatrix, report, path, max_panels: int = 12) -> None:
    """Scatter plots of the screened column pairs (conditioning vs target).

    Shows at most ``max_panels`` pairs, strongest first; an empty screening
    set produces a single annotated empty panel so the file always exists.
    """
    pairs = sorted(report.screened_pairs, key=lambda t: -abs(t[2]))[:max_panels]
    if not pairs:
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        ax.text(0.5, 0.5, "screening set is empty", ha="center", va="center")
        ax.set_axis_off()
        fig.savefig(path, dpi=150)
        plt.close(fig)
        return
    ncols = min(4, len(pairs))
    nrows = (len(pairs) + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.0 * ncols, 2.6 * nrows), squeeze=False)
    for ax in axes.flat:
        ax.set_axis_off()
    for ax, (k, l, val) in zip(axes.flat, pairs):
        ax.set_axis_on()
        ax.scatter(data.values[:, k - 1], data.values[:, l - 1], s=8, alpha=0.7)
        ax.set_xlabel(data.column_labels[k - 1], fontsize=8)
        ax.set_ylabel(data.column_labels[l - 1], fontsize=8)
        ax.set_title(f"xi = {val:.3f}", fontsize=9)
        ax.tick_params(labelsize=7)
    fig.suptitle("screened pairs (conditioning column on x-axis)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rejection_bars(results, path) -> None:
    """Grouped bar chart of rejection frequencies, one group per (model, n, p) cell."""
    results = list(results)
    kinds: list[str] = []
    for res in results:
        for kind in res.tests:
            if kind not in kinds:
                kinds.append(kind)
    kinds.append("screen")
    groups = [f"{r.model}\nn={r.n}, p={r.p}" for r in results]
    width = 0.8 / len(kinds)
    x = np.arange(len(results))
    fig, ax = plt.subplots(figsize=(max(6.0, 1.5 * len(results)), 4.0))
    for i, kind in enumerate(kinds):
        if kind == "screen":
            heights = [r.screen_rate for r in results]
        else:
            heights = [r.rejection_rate.get(kind, 0.0) for r in results]
        ax.bar(x + (i - (len(kinds) - 1) / 2.0) * width, heights, width, label=kind)
    ax.set_xticks(x, groups, fontsize=8)
    ax.set_ylabel("rejection / hit frequency")
    ax.set_ylim(0.0, 1.05)
    ax.axhline(results[0].alpha if results else 0.05, color="grey", lw=0.8, ls="--")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
