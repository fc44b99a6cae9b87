"""From-first-principles classifiers and evaluation metrics.

Eight supervised kinds (DT, RF, KNN, NB, LR, SVM, ANN, GB) behind one
train/predict/serialize surface, plus confusion-matrix and macro-averaged
metric computation. All randomness flows from explicit seeds.
"""

from icstwin.ml.base import (
    KINDS,
    ClassifierBase,
    DimensionMismatch,
    MissingClass,
    Standardizer,
    load_classifier,
    train,
)
from icstwin.ml.metrics import ConfusionMatrix, MetricsReport, compute_metrics

__all__ = [
    "KINDS",
    "ClassifierBase",
    "ConfusionMatrix",
    "DimensionMismatch",
    "MetricsReport",
    "MissingClass",
    "Standardizer",
    "compute_metrics",
    "load_classifier",
    "train",
]
