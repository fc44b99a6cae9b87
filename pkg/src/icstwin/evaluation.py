"""Train/eval orchestration for the eight classifier kinds plus the stack.

This layer owns the dataset-to-feature wiring: with staleness features on,
the two age columns also feed every model's binarized staleness channels
(exact-zero ages are what make DoS samples separable for every model
family, not just trees).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from icstwin.dataset import LABEL_NAMES, LabeledSample, features_from_samples
from icstwin.ml import KINDS, ClassifierBase, ConfusionMatrix, MetricsReport, compute_metrics, train
from icstwin.stacking import StackedModel, train_stacked

STACKED_NAME = "stacked"


def feature_layout(include_staleness: bool = True, include_motor: bool = True) -> list[str]:
    layout = ["tank_level", "flow_level", "bottle_level"]
    if include_motor:
        layout.append("motor_state")
    if include_staleness:
        layout.extend(["fl_age", "bll_age"])
    return layout


def kind_hyperparams(kind: str, include_staleness: bool = True, include_motor: bool = True) -> dict:
    """Pipeline defaults per kind; age columns get indicator channels."""
    params: dict = {}
    if include_staleness:
        layout = feature_layout(include_staleness, include_motor)
        params["indicator_columns"] = [layout.index("fl_age"), layout.index("bll_age")]
    return params


@dataclass
class EvaluatedModel:
    name: str
    model: ClassifierBase | StackedModel
    confusion: ConfusionMatrix
    report: MetricsReport

    def metrics_row(self) -> dict:
        row = {"model": self.name}
        row.update(self.report.to_dict(labels=LABEL_NAMES))
        return row


def evaluate(name: str, model, X_test: np.ndarray, y_test: np.ndarray, n_classes: int = 5) -> EvaluatedModel:
    pred = np.asarray(model.predict(X_test))
    cm = ConfusionMatrix.from_predictions(y_test, pred, n_classes)
    return EvaluatedModel(name=name, model=model, confusion=cm, report=compute_metrics(cm))


def train_eval_suite(
    train_samples: list[LabeledSample],
    test_samples: list[LabeledSample],
    kinds: tuple[str, ...] = KINDS,
    include_stacked: bool = True,
    seed: int = 0,
    include_staleness: bool = True,
    include_motor: bool = True,
    folds: int = 5,
) -> dict[str, EvaluatedModel]:
    """Train every requested kind (plus the stack) and evaluate on the test split."""
    Xtr, ytr = features_from_samples(train_samples, include_staleness, include_motor)
    Xte, yte = features_from_samples(test_samples, include_staleness, include_motor)

    out: dict[str, EvaluatedModel] = {}
    for kind in kinds:
        hp = kind_hyperparams(kind, include_staleness, include_motor)
        model = train(kind, Xtr, ytr, hyperparams=hp, seed=seed)
        out[kind] = evaluate(kind, model, Xte, yte)

    if include_stacked:
        level0_hp = {k: kind_hyperparams(k, include_staleness, include_motor) for k in ("GB", "DT", "NB")}
        stacked = train_stacked(Xtr, ytr, k=folds, seed=seed, level0_hyperparams=level0_hp)
        out[STACKED_NAME] = evaluate(STACKED_NAME, stacked, Xte, yte)
    return out
