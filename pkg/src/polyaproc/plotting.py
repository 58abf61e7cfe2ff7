"""Matplotlib rendering of the verification histograms.

Renders the scaled-sample histograms with the limiting Gamma density
overlaid, one figure per color, alongside the delimited histogram output.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .limits import GammaLimit, gamma_pdf


def freedman_diaconis_edges(samples: np.ndarray) -> np.ndarray:
    """Histogram bin edges with Freedman-Diaconis widths (2*IQR/n^(1/3))."""
    samples = np.asarray(samples, dtype=float)
    lo, hi = samples.min(), samples.max()
    q75, q25 = np.percentile(samples, [75, 25])
    iqr = q75 - q25
    if iqr <= 0 or hi <= lo:
        return np.linspace(lo, max(hi, lo + 1e-12), 11)
    width = 2.0 * iqr / len(samples) ** (1.0 / 3.0)
    nbins = max(1, math.ceil((hi - lo) / width))
    return np.linspace(lo, hi, nbins + 1)


def histogram_rows(samples, color: str, shape: float, scale: float) -> list[dict]:
    """Binned counts, densities, and the Gamma pdf at bin midpoints."""
    samples = np.asarray(samples, dtype=float)
    edges = freedman_diaconis_edges(samples)
    counts, edges = np.histogram(samples, bins=edges)
    total = counts.sum()
    rows = []
    for left, right, count in zip(edges[:-1], edges[1:], counts):
        mid = 0.5 * (left + right)
        density = count / (total * (right - left)) if total else 0.0
        rows.append(
            {
                "color": color,
                "bin_left": float(left),
                "bin_right": float(right),
                "count": int(count),
                "density": float(density),
                "gamma_pdf_mid": gamma_pdf(max(mid, 0.0), shape, scale),
            }
        )
    return rows


def render_histogram(samples, color: str, limit: GammaLimit, out_path: str) -> None:
    """Density histogram of one scaled marginal with its Gamma limit overlaid."""
    samples = np.asarray(samples, dtype=float)
    shape, scale = limit.marginal(color)
    edges = freedman_diaconis_edges(samples)

    fig, ax = plt.subplots(figsize=(6, 4))
    face = "#9ecae1" if color == "white" else "#3182bd"
    ax.hist(samples, bins=edges, density=True, color=face, edgecolor="black", alpha=0.7)
    grid = np.linspace(max(edges[0], 1e-9), edges[-1], 400)
    ax.plot(grid, [gamma_pdf(x, shape, scale) for x in grid], "r-", lw=2,
            label=f"Gamma({shape:g}, {scale:g})")
    ax.set_xlabel(f"scaled {color} count")
    ax.set_ylabel("density")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
