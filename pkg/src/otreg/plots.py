"""Report figures for rate experiments, rendered straight to files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import RateTable

__all__ = ["save_rate_plot"]


def save_rate_plot(table: RateTable, path) -> None:
    """Render the risk curve (log-log) with its fitted power law to ``path``.

    The image format follows the file extension (svg, png, pdf).  Degenerate
    tables (some mean risk exactly zero) fall back to linear axes since a
    log scale cannot show them.
    """
    sizes = np.array([row.N for row in table.rows], dtype=np.float64)
    risks = np.array([row.mean_sq_risk for row in table.rows], dtype=np.float64)
    errs = np.array([row.stderr for row in table.rows], dtype=np.float64)

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.errorbar(
        sizes,
        risks,
        yerr=errs,
        fmt="o",
        color="#1f6fb2",
        ecolor="#9bbfdd",
        capsize=3,
        label="mean squared risk",
    )
    if table.slope is not None:
        grid = np.geomspace(sizes.min(), sizes.max(), 64)
        ax.plot(
            grid,
            np.exp(table.intercept) * grid**table.slope,
            color="#c44e52",
            linewidth=1.4,
            label=f"fit: slope {table.slope:.3f}",
        )
    if not table.degenerate:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("sample size N")
    ax.set_ylabel("mean squared risk")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
