"""File reports for a query's reliability data.

Takes the exported plot document and writes it out as JSON, delimited
tables, and rendered figures: the sorted-distance curve with the box
overlay, and the relevance-band counts. Rendering happens only here; the
metrics layer stays render-free and the browser console draws its own
views from the same document.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_BAND_COLORS = {"high": "#2e8b57", "moderate": "#8c8c8c", "low": "#c0392b"}


def render_curve_figure(doc: dict, path: Path, title: str = "") -> None:
    """Sorted-distance curve with quartile overlay; the S-shape of a
    reliable search is visible at a glance."""
    curve = doc["curve"]
    box = doc["box"]
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(range(1, len(curve) + 1), curve, lw=1.6, color="#1f77b4",
            label="sorted distances")
    for key, style in (("q1", ":"), ("median", "--"), ("q3", ":")):
        ax.axhline(box[key], ls=style, lw=1.0, color="#555555")
        ax.annotate(key, xy=(1.0, box[key]), xycoords=("axes fraction", "data"),
                    fontsize=8, color="#555555", ha="right", va="bottom")
    metrics = doc["metrics"]
    ax.set_xlabel("record rank")
    ax.set_ylabel("distance to query")
    label = (f"largest gap {metrics['largest_gap']:.4f} | "
             f"relative gap {metrics['relative_gap_pct']:.2f}% | "
             f"verdict {doc['verdict']}")
    ax.set_title(title or label, fontsize=10)
    if title:
        ax.text(0.02, 0.96, label, transform=ax.transAxes, fontsize=8, va="top")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_bands_figure(doc: dict, path: Path) -> None:
    """Bar chart of the relevance-band counts."""
    bands = doc["bands"]
    names = ["high", "moderate", "low"]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.bar(names, [bands[n] for n in names],
           color=[_BAND_COLORS[n] for n in names])
    for i, n in enumerate(names):
        ax.text(i, bands[n], str(bands[n]), ha="center", va="bottom", fontsize=9)
    ax.set_ylabel("records")
    ax.set_title("relevance bands", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def write_report(doc: dict, out_dir: str | Path, stem: str = "query",
                 title: str = "") -> dict[str, Path]:
    """Write the full report bundle for one plot document.

    Produces ``<stem>_plot.json``, ``<stem>_curve.csv``,
    ``<stem>_metrics.csv``, ``<stem>_curve.png`` and ``<stem>_bands.png``
    under ``out_dir`` and returns the paths keyed by artifact name.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "plot_json": out_dir / f"{stem}_plot.json",
        "curve_csv": out_dir / f"{stem}_curve.csv",
        "metrics_csv": out_dir / f"{stem}_metrics.csv",
        "curve_png": out_dir / f"{stem}_curve.png",
        "bands_png": out_dir / f"{stem}_bands.png",
    }

    paths["plot_json"].write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

    with paths["curve_csv"].open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["rank", "distance", "similarity"])
        for rank, d in enumerate(doc["curve"], start=1):
            writer.writerow([rank, repr(float(d)), repr(1.0 - float(d))])

    metrics = doc["metrics"]
    with paths["metrics_csv"].open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        names = list(metrics) + ["verdict"]
        writer.writerow(names)
        writer.writerow([repr(float(metrics[n])) for n in metrics] + [doc["verdict"]])

    render_curve_figure(doc, paths["curve_png"], title=title)
    render_bands_figure(doc, paths["bands_png"])
    return paths
