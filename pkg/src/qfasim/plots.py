"""Figure rendering for report outputs.

Everything draws straight to files through the Agg backend, so no display
is ever needed.  Figures accompany the JSON/CSV reports: sign-pattern
heatmaps, acceptance-value histograms around the cutpoint, and singular
value spectra.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_sign_matrix_figure(sign, path, title: str = "sign pattern") -> None:
    """Heatmap of a +/-1 matrix (SignMatrix or plain array)."""
    arr = np.asarray(getattr(sign, "signs", sign), dtype=float)
    rows, cols = arr.shape
    width = min(10.0, max(3.5, cols / 16.0))
    height = min(6.0, max(2.5, rows / 4.0))
    fig, ax = plt.subplots(figsize=(width, height))
    im = ax.imshow(arr, cmap="RdBu_r", vmin=-1, vmax=1, aspect="auto",
                   interpolation="nearest")
    ax.set_xlabel("suffix index")
    ax.set_ylabel("prefix index")
    ax.set_title(title)
    cbar = fig.colorbar(im, ax=ax, ticks=[-1, 1])
    cbar.set_label("sign")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_value_histogram(values, cutpoint, path,
                         title: str = "acceptance values") -> None:
    """Histogram of acceptance values with the cutpoint marked."""
    flat = np.asarray(values, dtype=float).ravel()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(flat, bins=min(80, max(10, flat.size // 8 + 1)), color="steelblue",
            edgecolor="white")
    ax.axvline(float(cutpoint), color="firebrick", linestyle="--",
               label=f"cutpoint = {float(cutpoint):g}")
    ax.set_xlabel("acceptance value")
    ax.set_ylabel("count")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_margin_histogram(values, cutpoint, path,
                          title: str = "margins above/below the cutpoint") -> None:
    """Histogram of |value - cutpoint| on a log axis."""
    flat = np.abs(np.asarray(values, dtype=float).ravel() - float(cutpoint))
    flat = flat[flat > 0]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if flat.size:
        bins = np.logspace(np.log10(flat.min()) - 0.1, np.log10(flat.max()) + 0.1, 40)
        ax.hist(flat, bins=bins, color="darkseagreen", edgecolor="white")
        ax.set_xscale("log")
    ax.set_xlabel("|value - cutpoint|")
    ax.set_ylabel("count")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_singular_values_figure(svals, path, rel_tol: float | None = None,
                                title: str = "singular values") -> None:
    """Spectrum plot on a log axis, with the rank threshold if given."""
    sv = np.asarray(svals, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(np.arange(1, sv.size + 1), np.maximum(sv, 1e-300), "o-",
                color="slateblue")
    if rel_tol is not None and sv.size:
        ax.axhline(rel_tol * sv.max(), color="firebrick", linestyle="--",
                   label=f"rank threshold ({rel_tol:g} x max)")
        ax.legend()
    ax.set_xlabel("index")
    ax.set_ylabel("singular value")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
