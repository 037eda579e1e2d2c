"""Figure rendering for the report path. File output only (Agg backend)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_joint", "save_kscan", "save_marginal", "save_trace"]

_DPI = 150


def save_trace(path, runs_data, param_name: str) -> Path:
    """Scatter of a parameter along each run's chain, colored by log weight.

    ``runs_data`` is a list of (m, values, logweights) triples, one per run.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    if runs_data:
        vmax = max(float(np.max(lw[np.isfinite(lw)], initial=-np.inf)) for _, _, lw in runs_data)
        vmin = vmax - 30.0
        sc = None
        for m, values, logweights in runs_data:
            colors = np.clip(logweights, vmin, vmax)
            sc = ax.scatter(m, values, c=colors, s=3, cmap="viridis", vmin=vmin, vmax=vmax)
        if sc is not None:
            fig.colorbar(sc, ax=ax, label="ln posterior weight (clipped)")
    ax.set_xlabel("iteration m")
    ax.set_ylabel(param_name)
    ax.set_title(f"sample chain trace: {param_name}")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_marginal(path, hist, param_name: str) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    ax.stairs(hist.mass, hist.edges, fill=True, alpha=0.6)
    ax.set_xlabel(param_name)
    ax.set_ylabel("posterior mass per bin")
    ax.set_title(f"marginal: {param_name} (out of range: {hist.out_of_range:.3g})")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_joint(path, joint, name_x: str, name_y: str) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    mesh = ax.pcolormesh(joint.x_edges, joint.y_edges, joint.mass.T, cmap="magma")
    fig.colorbar(mesh, ax=ax, label="posterior mass per cell")
    ax.set_xlabel(name_x)
    ax.set_ylabel(name_y)
    ax.set_title(f"joint marginal: {name_x} vs {name_y}")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_kscan(path, ks, deltas, cpus, delta_fit, cpu_fit) -> Path:
    """Log-log scatter of delta(lnE) and CPU cost vs K with fitted power laws."""
    path = Path(path)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.8))
    ks = np.asarray(ks, dtype=float)
    grid = np.linspace(ks.min(), ks.max(), 64)

    def panel(ax, values, fit, label):
        vals = np.array([np.nan if v is None else v for v in values], dtype=float)
        good = np.isfinite(vals) & (vals > 0)
        ax.loglog(ks[good], vals[good], "o")
        if fit is not None:
            exponent, ln_amp = fit
            ax.loglog(grid, np.exp(ln_amp) * grid**exponent, "-", alpha=0.7,
                      label=f"slope {exponent:.3f}")
            ax.legend()
        ax.set_xlabel("live points K")
        ax.set_ylabel(label)

    panel(ax1, deltas, delta_fit, "delta lnE")
    panel(ax2, cpus, cpu_fit, "CPU time [s]")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
