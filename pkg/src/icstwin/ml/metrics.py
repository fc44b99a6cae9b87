"""Confusion matrices and macro-averaged classification metrics.

Rows are true labels, columns predictions close. Macro precision/recall/F1
are unweighted means over all classes; a class with no predicted positives
contributes precision 0, and F1 is 0 whenever precision and recall are
both 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts by (true, predicted); row sums equal per-class test counts."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError("confusion matrix must be square")
        if (counts < 0).any():
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", counts.astype(np.int64))

    @classmethod
    def from_predictions(cls, y_true: np.ndarray, y_pred: np.ndarray, n_classes: int = 5) -> "ConfusionMatrix":
        counts = np.zeros((n_classes, n_classes), dtype=np.int64)
        np.add.at(counts, (np.asarray(y_true, dtype=np.int64), np.asarray(y_pred, dtype=np.int64)), 1)
        return cls(counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def normalized(self) -> np.ndarray:
        """Row-normalized view; all-zero rows stay zero."""
        row_sums = self.counts.sum(axis=1, keepdims=True).astype(np.float64)
        safe = np.where(row_sums == 0, 1.0, row_sums)
        out = self.counts / safe
        return np.where(row_sums == 0, 0.0, out)


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class_precision: tuple[float, ...]
    per_class_recall: tuple[float, ...]
    per_class_f1: tuple[float, ...]

    def to_dict(self, labels: list[str] | None = None) -> dict:
        payload = {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
        }
        names = labels or [str(i) for i in range(len(self.per_class_precision))]
        payload["per_class"] = {
            name: {"precision": p, "recall": r, "f1": f}
            for name, p, r, f in zip(names, self.per_class_precision, self.per_class_recall, self.per_class_f1)
        }
        return payload


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    counts = cm.counts.astype(np.float64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("confusion matrix is empty")
    tp = np.diag(counts)
    predicted = counts.sum(axis=0)
    actual = counts.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(predicted > 0, tp / np.where(predicted == 0, 1, predicted), 0.0)
        recall = np.where(actual > 0, tp / np.where(actual == 0, 1, actual), 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / np.where(denom == 0, 1, denom), 0.0)
    return MetricsReport(
        accuracy=float(tp.sum() / total),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        per_class_precision=tuple(float(x) for x in precision),
        per_class_recall=tuple(float(x) for x in recall),
        per_class_f1=tuple(float(x) for x in f1),
    )
