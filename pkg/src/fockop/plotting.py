"""SVG heatmaps and decay plots. Output is deterministic for identical data."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "fockop"
_META = {"Date": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)


def heatmap(values, box, path, title="", label=""):
    """``values`` sampled row-major on ``box.grid(n)`` (rows = y)."""
    n = int(round(np.sqrt(np.size(values))))
    img = np.asarray(values, dtype=float).reshape(n, n)
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(img, origin="lower", extent=(box.xmin, box.xmax, box.ymin, box.ymax),
                   cmap="viridis", aspect="equal")
    fig.colorbar(im, ax=ax, label=label)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title(title)
    _save(fig, path)


def ring_profiles(report, path):
    """Ring maxima of both transforms per symbol, log scale."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for row in report.rows:
        line, = ax.semilogy(row.rings, np.maximum(row.berezin_profile, 1e-300), "o-",
                            label=row.symbol)
        ax.semilogy(row.rings, np.maximum(row.average_profile, 1e-300), "s--",
                    color=line.get_color())
    ax.set_xlabel("|z|")
    ax.set_ylabel("ring max (solid: Berezin, dashed: average)")
    ax.set_ylim(bottom=1e-16)
    ax.legend(fontsize=6)
    _save(fig, path)


def spectra(named_sigmas, path):
    """Singular values against index for each (name, sigma) pair."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, s in named_sigmas:
        ax.semilogy(np.arange(len(s)), np.maximum(s, 1e-300), ".-", label=name)
    ax.set_xlabel("index i")
    ax.set_ylabel("sigma_i")
    ax.set_ylim(bottom=1e-18)
    ax.legend(fontsize=6)
    _save(fig, path)
