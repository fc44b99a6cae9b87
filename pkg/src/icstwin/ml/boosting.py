"""Gradient boosting: one-vs-rest logistic loss, shrunk depth-3 regression trees.

Each class keeps an additive score F_c(x); every round fits a regression
tree to the logistic residuals y_c - sigmoid(F_c) with Newton leaf values.
Class probabilities are the normalized per-class sigmoids.
"""

from __future__ import annotations

import numpy as np

from icstwin.ml.base import ClassifierBase, one_hot
from icstwin.ml.tree import build_regression_tree, tree_apply


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -30.0, 30.0)))


class GradientBoosting(ClassifierBase):
    kind = "GB"

    @classmethod
    def default_hyperparams(cls) -> dict:
        return {"n_rounds": 100, "max_depth": 3, "min_leaf": 1, "learning_rate": 0.1}

    def _fit(self, Z, y):
        hp = self.hyperparams
        n, C = len(y), self.n_classes
        Y = one_hot(y, C)
        prior = Y.mean(axis=0).clip(1e-6, 1 - 1e-6)
        self.init_scores = np.log(prior / (1.0 - prior)).tolist()
        F = np.tile(np.asarray(self.init_scores), (n, 1))
        self.trees: list[list[dict]] = [[] for _ in range(C)]
        self.train_loss_history: list[float] = []
        scratch = np.empty(n, dtype=np.float64)

        for _ in range(hp["n_rounds"]):
            P = _sigmoid(F)
            for c in range(C):
                g = Y[:, c] - P[:, c]
                h = P[:, c] * (1.0 - P[:, c])
                tree = build_regression_tree(Z, g, h, hp["max_depth"], hp["min_leaf"])
                self.trees[c].append(tree)
                tree_apply(tree, Z, scratch)
                F[:, c] += hp["learning_rate"] * scratch
            P = _sigmoid(F).clip(1e-12, 1 - 1e-12)
            loss = -(Y * np.log(P) + (1 - Y) * np.log(1 - P)).sum(axis=1).mean()
            self.train_loss_history.append(float(loss))

    def _raw_scores(self, Z: np.ndarray) -> np.ndarray:
        F = np.tile(np.asarray(self.init_scores), (len(Z), 1))
        scratch = np.empty(len(Z), dtype=np.float64)
        lr = self.hyperparams["learning_rate"]
        for c, trees in enumerate(self.trees):
            for tree in trees:
                tree_apply(tree, Z, scratch)
                F[:, c] += lr * scratch
        return F

    def _proba(self, Z):
        p = _sigmoid(self._raw_scores(Z))
        return p / p.sum(axis=1, keepdims=True)

    def _params_to_dict(self):
        return {"init_scores": self.init_scores, "trees": self.trees}

    def _params_from_dict(self, payload):
        self.init_scores = payload["init_scores"]
        self.trees = payload["trees"]
