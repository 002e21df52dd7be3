"""Figures for the metrics report.

Rendering is headless (Agg) and the SVG output is reproducible: a fixed
hash salt and no timestamp, so identical inputs give identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import METRICS, BoundAudit, MetricRecord  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "startopo",
    "svg.fonttype": "none",
}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_metric_distributions(records: Sequence[MetricRecord], path: Path) -> Path:
    """One histogram panel per metric over all inferred topologies."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(2, 3, figsize=(9, 5), constrained_layout=True)
        for ax, name in zip(axes.flat, METRICS):
            values = [getattr(r, name) for r in records]
            lo, hi = min(values), max(values)
            bins = [x - 0.5 for x in range(lo, hi + 2)]
            ax.hist(values, bins=bins, color="#4c72b0", edgecolor="white")
            ax.set_title(name.replace("_", " "))
            ax.set_xlabel("value")
            ax.set_ylabel("topologies")
        fig.suptitle(f"{len(records)} inferred topologies")
        return _save(fig, path)


def plot_audit(audit: BoundAudit, path: Path) -> Path:
    """Observed spread next to its bound for every audited cell."""
    rows = [r for r in audit.rows if r.observed is not None and r.bound is not None]
    colors = {"within": "#55a868", "violated": "#c44e52",
              "achieved": "#55a868", "not-achieved": "#dd8452"}
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(7, 0.3 * len(rows) + 1.2), constrained_layout=True)
        ys = range(len(rows))
        ax.barh(ys, [float(r.bound) for r in rows], color="#dddddd", label="bound")
        ax.scatter([float(r.observed) for r in rows], ys,
                   c=[colors.get(r.verdict, "#333333") for r in rows], zorder=3, label="observed")
        ax.set_yticks(list(ys))
        ax.set_yticklabels([f"{r.metric} {r.measure} ({r.scope})" for r in rows])
        ax.invert_yaxis()
        ax.set_xlabel("value")
        ax.legend(loc="lower right", frameon=False)
        return _save(fig, path)


def write_figures(records: Sequence[MetricRecord], audit: BoundAudit, outdir: Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        plot_metric_distributions(records, outdir / "metric_distributions.svg"),
        plot_audit(audit, outdir / "bound_audit.svg"),
    ]
