"""Figure rendering for evaluation reports.

Two figures accompany each report: a grouped bar chart of per-dataset
correlations and a bar chart of average deviations. Rendering uses the Agg
backend so the CLI works headless, and PNG metadata is pinned so repeated
runs produce identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import EvalReport

# Fixed Software tag: the default embeds the library version, which would
# make otherwise-identical runs differ after an environment upgrade.
_PNG_METADATA = {"Software": "wordassoc"}


def plot_correlations(report: EvalReport, path: str | Path) -> Path:
    """Grouped bars: one group per dataset, one bar per measure."""
    path = Path(path)
    measures = report.measures
    datasets = report.datasets
    x = np.arange(len(datasets), dtype=float)
    group_width = 0.8
    bar_width = group_width / max(len(measures), 1)
    fig, ax = plt.subplots(figsize=(max(6.0, 1.8 * len(datasets)), 4.5))
    for i, measure in enumerate(measures):
        offsets = x - group_width / 2 + (i + 0.5) * bar_width
        values = [report.correlations[measure][d] for d in datasets]
        ax.bar(offsets, values, width=bar_width, label=measure)
    ax.set_xticks(x)
    ax.set_xticklabels(datasets, rotation=30, ha="right")
    ax.set_ylabel("mean test-fold Spearman")
    ax.set_title(f"Cross-validated correlation (k={report.k}, seed={report.seed})")
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.legend(fontsize="small", ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)
    return path


def plot_average_deviation(report: EvalReport, path: str | Path) -> Path:
    """Bars of average deviation from the per-dataset best, lower is better."""
    path = Path(path)
    measures = report.measures
    values = [report.avg_deviation[m] for m in measures]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(measures)), 4.0))
    ax.bar(np.arange(len(measures)), values, color="tab:blue")
    ax.set_xticks(np.arange(len(measures)))
    ax.set_xticklabels(measures, rotation=45, ha="right")
    ax.set_ylabel("average deviation from best")
    ax.set_title("Deviation from the best measure per dataset (lower is better)")
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)
    return path


def render_report_figures(report: EvalReport, report_path: str | Path) -> list[Path]:
    """Render both figures next to the report file, named after its stem."""
    report_path = Path(report_path)
    stem = report_path.with_suffix("")
    return [
        plot_correlations(report, Path(f"{stem}_correlations.png")),
        plot_average_deviation(report, Path(f"{stem}_deviation.png")),
    ]
