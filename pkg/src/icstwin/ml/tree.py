"""CART trees: gini classification and variance-reduction regression.

The splitter is vectorized per node: one stable argsort per candidate
feature, prefix sums over the sorted targets, then every boundary between
distinct feature values scored at once. Ties resolve to the first
(lowest feature index, lowest threshold) candidate so fits are
deterministic.
"""

from __future__ import annotations

import numpy as np

from icstwin.ml.base import ClassifierBase, one_hot


def _find_best_classification_split(Z, Yoh, idx, feature_ids, min_leaf):
    """Return (weighted_child_gini, feature, threshold) or None."""
    n = len(idx)
    if n < 2 * min_leaf:
        return None
    best = None
    for j in feature_ids:
        x = Z[idx, j]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        if xs[0] == xs[-1]:
            continue
        counts = np.cumsum(Yoh[idx[order]], axis=0)
        total = counts[-1]
        left_n = np.arange(1, n, dtype=np.float64)
        right_n = n - left_n
        left_counts = counts[:-1]
        right_counts = total - left_counts
        gini_l = 1.0 - (left_counts**2).sum(axis=1) / left_n**2
        gini_r = 1.0 - (right_counts**2).sum(axis=1) / right_n**2
        weighted = (left_n * gini_l + right_n * gini_r) / n
        valid = (xs[1:] > xs[:-1]) & (left_n >= min_leaf) & (right_n >= min_leaf)
        if not valid.any():
            continue
        weighted = np.where(valid, weighted, np.inf)
        k = int(np.argmin(weighted))
        if best is None or weighted[k] < best[0]:
            best = (float(weighted[k]), int(j), float((xs[k] + xs[k + 1]) / 2.0))
    return best


def _find_best_regression_split(Z, g, idx, feature_ids, min_leaf):
    """Maximize sum_L^2/n_L + sum_R^2/n_R (equivalent to variance reduction)."""
    n = len(idx)
    if n < 2 * min_leaf:
        return None
    best = None
    total = g[idx].sum()
    base = total * total / n
    for j in feature_ids:
        x = Z[idx, j]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        if xs[0] == xs[-1]:
            continue
        gs = np.cumsum(g[idx[order]])
        left_n = np.arange(1, n, dtype=np.float64)
        right_n = n - left_n
        left_sum = gs[:-1]
        right_sum = total - left_sum
        score = left_sum**2 / left_n + right_sum**2 / right_n
        valid = (xs[1:] > xs[:-1]) & (left_n >= min_leaf) & (right_n >= min_leaf)
        if not valid.any():
            continue
        score = np.where(valid, score, -np.inf)
        k = int(np.argmax(score))
        gain = float(score[k] - base)
        if gain > 1e-12 and (best is None or score[k] > best[0]):
            best = (float(score[k]), int(j), float((xs[k] + xs[k + 1]) / 2.0))
    return best


def build_classification_tree(Z, y, n_classes, max_depth, min_leaf, rng=None, max_features=None):
    """Grow a gini CART tree as nested dicts; leaves hold class-count vectors."""
    Yoh = one_hot(y, n_classes)

    def grow(idx, depth):
        counts = Yoh[idx].sum(axis=0)
        if (max_depth is not None and depth >= max_depth) or counts.max() == counts.sum() or len(idx) < 2 * min_leaf:
            return {"leaf": counts.tolist()}
        n = len(idx)
        parent_gini = 1.0 - ((counts / n) ** 2).sum()
        best = None
        if max_features is not None and max_features < Z.shape[1]:
            feature_ids = np.sort(rng.choice(Z.shape[1], size=max_features, replace=False))
            best = _find_best_classification_split(Z, Yoh, idx, feature_ids, min_leaf)
        if best is None or parent_gini - best[0] <= 1e-12:
            # sampled features gave no usable split; fall back to the full search
            best = _find_best_classification_split(Z, Yoh, idx, np.arange(Z.shape[1]), min_leaf)
        if best is None or parent_gini - best[0] <= 1e-12:
            return {"leaf": counts.tolist()}
        _, feature, threshold = best
        mask = Z[idx, feature] <= threshold
        return {
            "f": feature,
            "t": threshold,
            "l": grow(idx[mask], depth + 1),
            "r": grow(idx[~mask], depth + 1),
        }

    return grow(np.arange(len(y)), 0)


def build_regression_tree(Z, g, h, max_depth, min_leaf):
    """Grow a regression tree on gradients; leaves hold Newton steps sum(g)/sum(h)."""

    def leaf(idx):
        denom = h[idx].sum()
        value = g[idx].sum() / denom if denom > 1e-12 else 0.0
        return {"leaf": float(np.clip(value, -10.0, 10.0))}

    def grow(idx, depth):
        if max_depth is not None and depth >= max_depth:
            return leaf(idx)
        best = _find_best_regression_split(Z, g, idx, np.arange(Z.shape[1]), min_leaf)
        if best is None:
            return leaf(idx)
        _, feature, threshold = best
        mask = Z[idx, feature] <= threshold
        return {
            "f": feature,
            "t": threshold,
            "l": grow(idx[mask], depth + 1),
            "r": grow(idx[~mask], depth + 1),
        }

    return grow(np.arange(len(g)), 0)


def tree_leaf(node, row):
    """Scalar descent for one sample; much faster than masking on tiny batches."""
    while "leaf" not in node:
        node = node["l"] if row[node["f"]] <= node["t"] else node["r"]
    return node["leaf"]


def tree_apply(node, Z, out, idx=None):
    """Fill ``out[idx]`` with each row's leaf payload (vector or scalar)."""
    if idx is None:
        if len(Z) == 1:
            out[0] = tree_leaf(node, Z[0])
            return
        idx = np.arange(len(Z))
    if "leaf" in node:
        out[idx] = node["leaf"]
        return
    mask = Z[idx, node["f"]] <= node["t"]
    tree_apply(node["l"], Z, out, idx[mask])
    tree_apply(node["r"], Z, out, idx[~mask])


class DecisionTree(ClassifierBase):
    """Single CART tree, gini impurity; leaf probabilities are class fractions."""

    kind = "DT"

    @classmethod
    def default_hyperparams(cls) -> dict:
        return {"max_depth": 12, "min_leaf": 2}

    def _fit(self, Z, y):
        self.root = build_classification_tree(
            Z, y, self.n_classes, self.hyperparams["max_depth"], self.hyperparams["min_leaf"]
        )

    def _proba(self, Z):
        out = np.empty((len(Z), self.n_classes), dtype=np.float64)
        tree_apply(self.root, Z, out)
        return out / out.sum(axis=1, keepdims=True)

    def _params_to_dict(self):
        return {"root": self.root}

    def _params_from_dict(self, payload):
        self.root = payload["root"]
