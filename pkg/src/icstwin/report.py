"""Report emission: delimited outputs plus matplotlib figures rendered to files.

Every evaluation artifact lands as data (CSV/JSON) and, where a picture
helps, as an SVG figure next to it: row-normalized confusion heatmaps per
model and the classified-traffic distribution pie from the online run.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from icstwin.dataset import LABEL_NAMES
from icstwin.ml.metrics import ConfusionMatrix


def confusion_csv_text(cm: ConfusionMatrix, labels: list[str] | None = None) -> str:
    labels = labels or LABEL_NAMES
    norm = cm.normalized()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["true\\pred"] + labels)
    for name, row in zip(labels, norm):
        writer.writerow([name] + [f"{v:.6f}" for v in row])
    return buf.getvalue()


def save_confusion_csv(cm: ConfusionMatrix, path: str | Path, labels: list[str] | None = None) -> None:
    Path(path).write_text(confusion_csv_text(cm, labels), encoding="utf-8")


def save_confusion_svg(cm: ConfusionMatrix, path: str | Path, title: str, labels: list[str] | None = None) -> None:
    """Row-normalized heatmap with per-cell annotations."""
    labels = labels or LABEL_NAMES
    norm = cm.normalized()
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    im = ax.imshow(norm, cmap="Blues", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(labels)), labels, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(len(labels)), labels, fontsize=8)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(title, fontsize=10)
    for i in range(len(labels)):
        for j in range(len(labels)):
            colour = "white" if norm[i, j] > 0.5 else "black"
            ax.text(j, i, f"{norm[i, j]:.2f}", ha="center", va="center", fontsize=7, color=colour)
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def save_metrics_table(rows: list[dict], path: str | Path) -> None:
    """One JSON row per model, stable key order."""
    Path(path).write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def metrics_table_text(rows: list[dict]) -> str:
    header = f"{'model':10s} {'accuracy':>9s} {'precision':>10s} {'recall':>8s} {'f1':>8s}"
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row['model']:10s} {row['accuracy']:9.3f} {row['macro_precision']:10.3f} "
            f"{row['macro_recall']:8.3f} {row['macro_f1']:8.3f}"
        )
    return "\n".join(lines)


def save_label_pie_svg(histogram: dict[str, int], path: str | Path, title: str) -> None:
    """Distribution of classified samples across labels, dashboard style."""
    names = [name for name in histogram if histogram[name] > 0]
    sizes = [histogram[name] for name in names]
    fig, ax = plt.subplots(figsize=(3.6, 3.6))
    ax.pie(sizes, labels=names, autopct="%1.1f%%", textprops={"fontsize": 8})
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def save_state_trace_csv(states, path: str | Path) -> None:
    """Ground-truth physics trajectory, one row per tick."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ts", "tank_level", "pipe_flow", "bottle_level", "valve_open", "bottles_filled"])
    for s in states:
        writer.writerow(
            [f"{s.sim_time:.6f}", f"{s.tank_level:.6f}", f"{s.pipe_flow:.6f}", f"{s.bottle_level:.6f}", int(s.valve_open), s.bottles_filled]
        )
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def save_frame_trace_jsonl(trace: list[dict], path: str | Path) -> None:
    Path(path).write_text("".join(json.dumps(rec) + "\n" for rec in trace), encoding="utf-8")
