"""SVG figures for the CLI datasets (matplotlib, non-interactive backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "xp2"  # stable ids, so identical data gives identical files


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def line_plot(path, x, series: dict, xlabel: str, ylabel: str, title: str = ""):
    """One line per entry of ``series`` (label -> y values) against ``x``."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, y in series.items():
        ax.plot(x, y, label=label, lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.axhline(0.0, color="0.7", lw=0.6, zorder=0)
    ax.legend(frameon=False)
    _save(fig, path)


def scatter_plot(path, groups: dict, xlabel: str, ylabel: str, title: str = ""):
    """Scatter of labelled (x, y) groups."""
    fig, ax = plt.subplots(figsize=(6, 4))
    colors = ["black", "red", "blue", "green"]
    for (label, (x, y)), color in zip(groups.items(), colors):
        ax.scatter(x, y, s=14, color=color, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.axhline(0.0, color="0.7", lw=0.6, zorder=0)
    ax.legend(frameon=False)
    _save(fig, path)


def phase_plot(path, x, p_upper, p_lower, title: str = ""):
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(x, p_upper, color="C0", lw=1.2)
    ax.plot(x, p_lower, color="C0", lw=1.2)
    ax.fill_between(x, p_lower, p_upper, color="C0", alpha=0.15)
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_aspect("equal", adjustable="datalim")
    if title:
        ax.set_title(title)
    _save(fig, path)
