"""Figure rendering for the CLI report paths.

Every plotting function writes a file and returns its path; nothing is shown
interactively (the Agg backend is forced so the CLI works headless).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_density_figure",
    "save_trajectory_figure",
    "save_vdp_figure",
]


def save_density_figure(hist, path, ref=None, title=""):
    """Histogram densities as a step plot, optionally overlaid with a reference density."""
    fig, ax = plt.subplots(figsize=(7, 4))
    edges = hist.bin_edges()
    dens = hist.densities()
    ax.stairs(dens, edges, fill=True, alpha=0.45, label="empirical")
    if ref is not None:
        xs = np.linspace(hist.lo, hist.hi, 600)
        ys = []
        for x in xs:
            try:
                ys.append(ref.density(float(x)) if ref.table.sub.contains(float(x)) else 0.0)
            except Exception:
                ys.append(np.nan)
        ax.plot(xs, ys, "k-", lw=1.2, label="speed density (normalized)")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_trajectory_figure(thinned, path, deltas=(), title=""):
    """Thinned trajectory X_n against accumulated time Gamma_n."""
    fig, ax = plt.subplots(figsize=(7, 4))
    if thinned is not None and len(thinned):
        ax.plot(thinned[:, 1], thinned[:, 2], lw=0.6)
    for d in deltas:
        ax.axhline(d, color="r", ls="--", lw=0.8)
    ax.set_xlabel("accumulated time")
    ax.set_ylabel("X")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_vdp_figure(hist2d, path, title=""):
    """2D occupation density as a heatmap."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    dens = hist2d.densities()
    im = ax.imshow(
        dens.T,
        origin="lower",
        extent=(hist2d.lo, hist2d.hi, hist2d.lo, hist2d.hi),
        aspect="equal",
        cmap="viridis",
    )
    fig.colorbar(im, ax=ax, shrink=0.85, label="density")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
