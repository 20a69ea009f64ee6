"""Figures written next to the CSV/JSON outputs of the CLI."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "spacefp",
    "svg.fonttype": "none",
}


def _save(fig, path):
    # drop the timestamp so repeated runs differ only if the picture does
    meta = {"Date": None} if str(path).endswith((".svg", ".pdf")) else {}
    fig.savefig(path, metadata=meta, bbox_inches="tight")
    plt.close(fig)


def _colors(n):
    cmap = plt.get_cmap("tab10" if n <= 10 else "tab20" if n <= 20 else "turbo")
    if n <= 20:
        return [cmap(i) for i in range(n)]
    return [cmap(x) for x in np.linspace(0, 1, n)]


def plot_mds(coords, labels, path, title=None):
    """2D scatter of an MDS embedding, one color per distinct label."""
    labels = [str(x) for x in labels]
    uniq = sorted(set(labels))
    colors = dict(zip(uniq, _colors(len(uniq))))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4))
        for lab in uniq:
            pts = np.array([c for c, l in zip(coords, labels) if l == lab]).reshape(-1, 2)
            ax.scatter(pts[:, 0], pts[:, 1], s=14, color=colors[lab], label=lab,
                       edgecolors="none", alpha=0.85)
        ax.set_xlabel("MDS 1")
        ax.set_ylabel("MDS 2")
        if title:
            ax.set_title(title)
        if len(uniq) <= 20:
            ax.legend(frameon=False, loc="best", markerscale=1.2)
        _save(fig, path)


def plot_trace(trace, path, xlabel=None):
    """Mean pairwise distance per candidate; the chosen candidate is marked."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        ax.plot(trace.candidates, trace.scores, marker="o", ms=3, lw=1, color="0.2")
        best = trace.best()
        ax.axvline(best, color="tab:red", lw=0.8, ls="--")
        ax.set_xlabel(xlabel or ("duration" if trace.phase == "duration" else "resolution"))
        ax.set_ylabel("mean pairwise distance")
        _save(fig, path)


def plot_sweep(summary, path, param=None):
    """Mean SP and DB accuracy against one sensitivity parameter."""
    rows = [r for r in summary if param is None or r["param"] == param]
    x = [r["value"] for r in rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4, 3))
        ax.plot(x, [r["sp_mean"] for r in rows], marker="o", ms=3, label="SP")
        ax.plot(x, [r["db_mean"] for r in rows], marker="s", ms=3, label="DB")
        ax.axhline(0.1, color="0.6", lw=0.7, ls=":")
        ax.set_ylim(0, 1.05)
        ax.set_xlabel(param or rows[0]["param"] if rows else "")
        ax.set_ylabel("accuracy")
        ax.legend(frameon=False)
        _save(fig, path)
