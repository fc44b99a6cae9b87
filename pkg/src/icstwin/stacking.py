"""Two-level stacked ensemble: GB, DT, NB bases under an MLP meta-learner.

The meta-learner trains on out-of-fold base predictions only: stratified
k-fold over the training set, each fold's rows predicted by bases fitted
on the other folds, so no Level-1 input was produced by a model that saw
that row. The bases are then refitted on the full training set for
inference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from icstwin.ml.base import ClassifierBase, MissingClass, load_classifier, one_hot, train
from icstwin.ml.neural import MlpClassifier

BUNDLE_SCHEMA_VERSION = 1
LEVEL0_KINDS = ("GB", "DT", "NB")  # P1, P2, P3


class FoldTooSmall(ValueError):
    pass


def _sharpen(P: np.ndarray, temperature: float) -> np.ndarray:
    """Raise probabilities to 1/temperature and renormalize.

    Base models refitted on the full training set are sharper than the
    out-of-fold models that produced the meta-learner's training rows; a
    fixed low temperature saturates both toward the simplex corners so the
    meta-learner sees matched representations at train and inference time.
    """
    if temperature == 1.0:
        return P
    sharp = np.maximum(P, 1e-12) ** (1.0 / temperature)
    return sharp / sharp.sum(axis=1, keepdims=True)


def stratified_kfold(y: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Fold id per sample; every fold receives every class at least once."""
    y = np.asarray(y)
    if k < 2:
        raise ValueError("k must be >= 2")
    folds = np.empty(len(y), dtype=np.int64)
    rng = np.random.default_rng(seed)
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        if len(idx) < k:
            raise FoldTooSmall(f"class {int(label)} has {len(idx)} samples for {k} folds")
        idx = idx[rng.permutation(len(idx))]
        folds[idx] = np.arange(len(idx)) % k
    return folds


@dataclass
class StackedModel:
    """Level-0 classifiers in fixed (GB, DT, NB) order plus the Level-1 MLP."""

    level0: list[ClassifierBase]
    level1: MlpClassifier
    folds: int
    level0_outputs: str = "proba"
    level0_temperature: float = 0.5
    n_classes: int = 5
    fold_assignments: np.ndarray | None = field(default=None, repr=False)
    fold_train_indices: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def meta_dim(self) -> int:
        return len(self.level0) * self.n_classes

    def _meta_features(self, X: np.ndarray) -> np.ndarray:
        blocks = []
        for model in self.level0:
            P = model.predict_proba(X)
            if self.level0_outputs == "onehot":
                P = one_hot(np.argmax(P, axis=1), self.n_classes)
            else:
                P = _sharpen(P, self.level0_temperature)
            blocks.append(P)
        return np.hstack(blocks)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        single = np.asarray(X).ndim == 1
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        P = self.level1.predict_proba(self._meta_features(X))
        return P[0] if single else P

    def predict(self, X: np.ndarray):
        P = self.predict_proba(X)
        if P.ndim == 1:
            return int(np.argmax(P))
        return np.argmax(P, axis=1)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": BUNDLE_SCHEMA_VERSION,
            "folds": self.folds,
            "level0_outputs": self.level0_outputs,
            "level0_temperature": self.level0_temperature,
            "n_classes": self.n_classes,
            "level0": [m.to_dict() for m in self.level0],
            "level1": self.level1.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, payload: dict) -> "StackedModel":
        if payload.get("schema_version") != BUNDLE_SCHEMA_VERSION:
            raise ValueError(f"unsupported bundle schema_version: {payload.get('schema_version')}")
        return cls(
            level0=[load_classifier(p) for p in payload["level0"]],
            level1=load_classifier(payload["level1"]),
            folds=payload["folds"],
            level0_outputs=payload["level0_outputs"],
            level0_temperature=payload["level0_temperature"],
            n_classes=payload["n_classes"],
        )

    @classmethod
    def from_json(cls, text: str) -> "StackedModel":
        return cls.from_dict(json.loads(text))


def train_stacked(
    X: np.ndarray,
    y: np.ndarray,
    k: int = 5,
    seed: int = 0,
    level0_hyperparams: dict[str, dict] | None = None,
    level1_hyperparams: dict | None = None,
    level0_outputs: str = "proba",
    level0_temperature: float = 0.5,
    n_classes: int = 5,
    repeats: int = 2,
) -> StackedModel:
    """Out-of-fold stacking: meta-learner trained only on held-out base predictions.

    With ``repeats`` > 1 the out-of-fold pass runs that many times with
    different fold seeds and the base predictions are averaged, which
    smooths fold noise without ever showing the meta-learner a prediction
    from a model that trained on that row.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if level0_outputs not in ("proba", "onehot"):
        raise ValueError("level0_outputs must be 'proba' or 'onehot'")
    present = set(np.unique(y).tolist())
    if present != set(range(n_classes)):
        raise MissingClass(f"stacking requires all {n_classes} classes; got {sorted(present)}")

    hp0 = level0_hyperparams or {}
    meta_rows: list[np.ndarray] = []
    folds = None
    fold_train_indices: list[np.ndarray] = []

    for repeat in range(repeats):
        rep_folds = stratified_kfold(y, k, seed + repeat)
        rep_meta = np.zeros((len(y), len(LEVEL0_KINDS) * n_classes), dtype=np.float64)
        if repeat == 0:
            folds = rep_folds
        for fold in range(k):
            holdout = np.flatnonzero(rep_folds == fold)
            rest = np.flatnonzero(rep_folds != fold)
            if repeat == 0:
                fold_train_indices.append(rest)
            for slot, kind in enumerate(LEVEL0_KINDS):
                model = train(kind, X[rest], y[rest], hyperparams=hp0.get(kind), seed=seed, n_classes=n_classes)
                P = model.predict_proba(X[holdout])
                if level0_outputs == "onehot":
                    P = one_hot(np.argmax(P, axis=1), n_classes)
                else:
                    P = _sharpen(P, level0_temperature)
                rep_meta[holdout, slot * n_classes : (slot + 1) * n_classes] = P
        meta_rows.append(rep_meta)

    meta = np.vstack(meta_rows)
    meta_y = np.tile(y, repeats)
    hp1 = {"hidden": 16, "max_iters": 1000, "lr": 0.3, "l2": 5e-3, **(level1_hyperparams or {})}
    level1 = MlpClassifier(n_classes=n_classes, seed=seed, **hp1)
    level1.fit(meta, meta_y)

    level0 = [train(kind, X, y, hyperparams=hp0.get(kind), seed=seed, n_classes=n_classes) for kind in LEVEL0_KINDS]
    return StackedModel(
        level0=level0,
        level1=level1,
        folds=k,
        level0_outputs=level0_outputs,
        level0_temperature=level0_temperature,
        n_classes=n_classes,
        fold_assignments=folds,
        fold_train_indices=fold_train_indices,
    )
