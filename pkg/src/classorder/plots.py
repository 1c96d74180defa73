"""Report figures. Rendered with the Agg backend so no display is needed."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .split_order import HistogramRow  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 5.0
colors = ["#2b8cbe", "#e34a33", "#31a354", "#756bb1", "#636363"]

params = {
    "axes.prop_cycle": matplotlib.cycler(color=colors),
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.family": "sans-serif",
    "font.size": 8,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": [fig_width, fig_width * golden_mean],
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "lines.linewidth": 1.2,
    "lines.markersize": 3,
}

# PNG metadata carries the matplotlib version by default; drop it so reruns
# produce identical bytes
_PNG_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="png", metadata=_PNG_META)
    plt.close(fig)
    return path


def census_figure(counts: Sequence[tuple[str, int]], path: str | Path) -> Path:
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        names = [n for n, _ in counts]
        values = [max(v, 0) for _, v in counts]
        ax.barh(names[::-1], values[::-1], color=colors[0])
        ax.set_xlabel("classes")
        if any(values):
            ax.set_xscale("symlog", linthresh=1)
        fig.tight_layout()
        return _save(fig, Path(path))


def min_order_figure(series: dict[str, Sequence[int]], path: str | Path) -> Path:
    """Level sizes, one line per class definition."""
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        for name, counts in sorted(series.items()):
            levels = np.arange(1, len(counts) + 1)
            ax.plot(levels, counts, marker="o", label=name)
        ax.set_xlabel("minimum order")
        ax.set_ylabel("classes")
        ax.set_yscale("symlog", linthresh=1)
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, Path(path))


def split_histogram_figure(rows: Sequence[HistogramRow], path: str | Path) -> Path:
    """Witness count per split-order class (ranked) and the running total."""
    with plt.rc_context(params):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(2 * fig_width, fig_width * golden_mean))
        counts = np.array([r.count for r in rows], dtype=float)
        ranked = counts[::-1]
        if ranked.size:
            ax1.loglog(np.arange(1, ranked.size + 1), ranked, marker=".", linestyle="none")
            ax2.plot(np.arange(1, counts.size + 1), [r.cumulative for r in rows])
        ax1.set_xlabel("class rank")
        ax1.set_ylabel("witness items")
        ax2.set_xlabel("classes, fewest witnesses first")
        ax2.set_ylabel("cumulative witness items")
        fig.tight_layout()
        return _save(fig, Path(path))


def order_figure(counts: dict[int, int], path: str | Path) -> Path:
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        ks = sorted(counts)
        ax.bar([str(k) for k in ks], [counts[k] for k in ks], color=colors[1])
        ax.set_xlabel("fixed order")
        ax.set_ylabel("classes")
        fig.tight_layout()
        return _save(fig, Path(path))
