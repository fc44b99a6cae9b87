"""Random forest: bootstrapped gini trees with per-node feature sampling."""

from __future__ import annotations

import math

import numpy as np

from icstwin.ml.base import ClassifierBase
from icstwin.ml.tree import build_classification_tree, tree_apply


class RandomForest(ClassifierBase):
    """Majority vote over bootstrapped trees; proba = vote fractions."""

    kind = "RF"

    @classmethod
    def default_hyperparams(cls) -> dict:
        # max_features None means sqrt(d), resolved at fit time
        return {"n_trees": 100, "max_depth": None, "min_leaf": 1, "max_features": None, "bootstrap": True}

    def _fit(self, Z, y):
        hp = self.hyperparams
        m = hp["max_features"]
        if m is None:
            m = max(1, int(math.sqrt(Z.shape[1])))
        rng = np.random.default_rng(self.seed)
        self.trees = []
        n = len(y)
        for _ in range(hp["n_trees"]):
            idx = rng.integers(0, n, size=n) if hp["bootstrap"] else np.arange(n)
            tree = build_classification_tree(
                Z[idx], y[idx], self.n_classes, hp["max_depth"], hp["min_leaf"],
                rng=rng, max_features=m if m < Z.shape[1] else None,
            )
            self.trees.append(tree)

    def _proba(self, Z):
        votes = np.zeros((len(Z), self.n_classes), dtype=np.float64)
        leaf = np.empty((len(Z), self.n_classes), dtype=np.float64)
        for tree in self.trees:
            tree_apply(tree, Z, leaf)
            votes[np.arange(len(Z)), np.argmax(leaf, axis=1)] += 1.0
        return votes / len(self.trees)

    def _params_to_dict(self):
        return {"trees": self.trees}

    def _params_from_dict(self, payload):
        self.trees = payload["trees"]
