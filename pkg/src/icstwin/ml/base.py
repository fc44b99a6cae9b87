"""Shared classifier plumbing: standardization, training entry point, serialization.

Every classifier standardizes features with statistics fitted on its own
training data, returns a probability vector per class summing to one, and
serializes to versioned JSON that is byte-identical across reruns with the
same seed.
"""

from __future__ import annotations

import json

import numpy as np

MODEL_SCHEMA_VERSION = 1

KINDS = ("DT", "RF", "KNN", "NB", "LR", "SVM", "ANN", "GB")


class MissingClass(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class Standardizer:
    """Per-feature (mean, std) fitted on training data; zero variance maps to std 1."""

    def __init__(self, mean: np.ndarray | None = None, std: np.ndarray | None = None):
        self.mean = mean
        self.std = std

    def fit(self, X: np.ndarray) -> "Standardizer":
        self.mean = X.mean(axis=0)
        std = X.std(axis=0)
        std[std == 0.0] = 1.0
        self.std = std
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, payload: dict) -> "Standardizer":
        return cls(mean=np.asarray(payload["mean"], dtype=np.float64), std=np.asarray(payload["std"], dtype=np.float64))


class ClassifierBase:
    """Common train/predict/serialize surface for all kinds.

    ``indicator_columns`` (shared hyperparam) appends, after
    standardization, one binary is-positive channel per listed raw feature,
    scaled by ``indicator_weight``. Smooth or proximity-based learners
    cannot recover an exact-zero-versus-positive semantic (the staleness
    ages) from standardized magnitudes alone; the channels make that
    semantic explicit inside the model without changing its input contract.
    """

    kind: str = "?"

    SHARED_HYPERPARAMS = {"indicator_columns": (), "indicator_weight": 3.0}

    def __init__(self, n_classes: int = 5, seed: int = 0, **hyperparams):
        self.n_classes = n_classes
        self.seed = seed
        defaults = {**self.SHARED_HYPERPARAMS, **self.default_hyperparams()}
        unknown = set(hyperparams) - set(defaults)
        if unknown:
            raise ValueError(f"unknown hyperparams for {self.kind}: {sorted(unknown)}")
        self.hyperparams = {**defaults, **hyperparams}
        self.hyperparams["indicator_columns"] = list(self.hyperparams["indicator_columns"])
        self.standardizer = Standardizer()
        self.n_features: int | None = None

    @classmethod
    def default_hyperparams(cls) -> dict:
        return {}

    # -- fitting ----------------------------------------------------------

    def _represent(self, X: np.ndarray) -> np.ndarray:
        """Standardize, prepending the scaled staleness indicator channels.

        Indicators lead so that tree splits preferring lower column indices
        on equal impurity pick the wide 0-vs-weight gap over the raw age
        column's thin one.
        """
        Z = self.standardizer.transform(X)
        cols = self.hyperparams["indicator_columns"]
        if not cols:
            return Z
        extra = self.hyperparams["indicator_weight"] * (X[:, cols] > 0.0).astype(np.float64)
        return np.hstack([extra, Z])

    def fit(self, X: np.ndarray, y: np.ndarray) -> "ClassifierBase":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.ndim != 2 or len(X) == 0:
            raise ValueError("training set must be a non-empty 2D array")
        if not np.isfinite(X).all():
            raise ValueError("training features must be finite")
        present = set(np.unique(y).tolist())
        needed = set(range(self.n_classes))
        if present - needed:
            raise ValueError(f"labels outside 0..{self.n_classes - 1}: {sorted(present - needed)}")
        if needed - present:
            raise MissingClass(f"classes absent from training set: {sorted(needed - present)}")
        self.n_features = X.shape[1]
        self.standardizer.fit(X)
        self._fit(self._represent(X), y)
        return self

    def _fit(self, Z: np.ndarray, y: np.ndarray) -> None:  # pragma: no cover - abstract
        raise NotImplementedError

    # -- inference --------------------------------------------------------

    def _check_input(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {X.shape[1]}")
        return X

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """(n, n_classes) non-negative rows summing to 1."""
        single = np.asarray(X).ndim == 1
        X = self._check_input(X)
        P = self._proba(self._represent(X))
        P = np.maximum(P, 0.0)
        P = P / P.sum(axis=1, keepdims=True)
        return P[0] if single else P

    def _proba(self, Z: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def predict(self, X: np.ndarray) -> np.ndarray | int:
        """Argmax of predict_proba with lowest-class-index tie-break."""
        P = self.predict_proba(X)
        if P.ndim == 1:
            return int(np.argmax(P))
        return np.argmax(P, axis=1)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": MODEL_SCHEMA_VERSION,
            "kind": self.kind,
            "n_classes": self.n_classes,
            "n_features": self.n_features,
            "seed": self.seed,
            "hyperparams": self.hyperparams,
            "standardization": self.standardizer.to_dict(),
            "parameters": self._params_to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def _params_to_dict(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    def _params_from_dict(self, payload: dict) -> None:  # pragma: no cover - abstract
        raise NotImplementedError

    @classmethod
    def from_dict(cls, payload: dict) -> "ClassifierBase":
        if payload.get("schema_version") != MODEL_SCHEMA_VERSION:
            raise ValueError(f"unsupported model schema_version: {payload.get('schema_version')}")
        model = classifier_for_kind(payload["kind"])(n_classes=payload["n_classes"], seed=payload["seed"], **payload["hyperparams"])
        model.n_features = payload["n_features"]
        model.standardizer = Standardizer.from_dict(payload["standardization"])
        model._params_from_dict(payload["parameters"])
        return model


def classifier_for_kind(kind: str) -> type[ClassifierBase]:
    from icstwin.ml.bayes import GaussianNaiveBayes
    from icstwin.ml.boosting import GradientBoosting
    from icstwin.ml.forest import RandomForest
    from icstwin.ml.linear import LinearSvm, LogisticRegression
    from icstwin.ml.neighbors import KNearestNeighbors
    from icstwin.ml.neural import MlpClassifier
    from icstwin.ml.tree import DecisionTree

    table = {
        "DT": DecisionTree,
        "RF": RandomForest,
        "KNN": KNearestNeighbors,
        "NB": GaussianNaiveBayes,
        "LR": LogisticRegression,
        "SVM": LinearSvm,
        "ANN": MlpClassifier,
        "GB": GradientBoosting,
    }
    try:
        return table[kind]
    except KeyError:
        raise ValueError(f"unknown classifier kind: {kind}") from None


def train(kind: str, X: np.ndarray, y: np.ndarray, hyperparams: dict | None = None, seed: int = 0, n_classes: int = 5) -> ClassifierBase:
    """Train one classifier kind; deterministic given the seed."""
    model = classifier_for_kind(kind)(n_classes=n_classes, seed=seed, **(hyperparams or {}))
    model.fit(X, y)
    return model


def load_classifier(payload: dict | str) -> ClassifierBase:
    if isinstance(payload, str):
        payload = json.loads(payload)
    return ClassifierBase.from_dict(payload)


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def one_hot(y: np.ndarray, n_classes: int) -> np.ndarray:
    Y = np.zeros((len(y), n_classes), dtype=np.float64)
    Y[np.arange(len(y)), y] = 1.0
    return Y
