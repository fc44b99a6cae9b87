"""K-nearest-neighbour classifier: Euclidean votes on standardized features.

Distance ties resolve to the lower training index (stable argsort); vote
ties resolve to the tied class whose nearest supporting neighbour comes
first.
"""

from __future__ import annotations

import numpy as np

from icstwin.ml.base import ClassifierBase


class KNearestNeighbors(ClassifierBase):
    kind = "KNN"

    @classmethod
    def default_hyperparams(cls) -> dict:
        return {"k": 5}

    def _fit(self, Z, y):
        self.train_Z = Z.copy()
        self.train_y = y.copy()

    def _proba(self, Z):
        if len(Z) * len(self.train_Z) > 4_000_000:
            # chunked for large replay batches
            P = np.empty((len(Z), self.n_classes))
            for start in range(0, len(Z), 512):
                P[start : start + 512] = self._proba(Z[start : start + 512])
            return P
        k = min(self.hyperparams["k"], len(self.train_Z))
        d2 = ((Z[:, None, :] - self.train_Z[None, :, :]) ** 2).sum(axis=2)
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        P = np.zeros((len(Z), self.n_classes), dtype=np.float64)
        for i in range(len(Z)):
            neighbour_labels = self.train_y[order[i]]
            counts = np.bincount(neighbour_labels, minlength=self.n_classes)
            top = counts.max()
            tied = np.flatnonzero(counts == top)
            if len(tied) > 1:
                winner = next(label for label in neighbour_labels if label in tied)
                boost = np.zeros(self.n_classes)
                boost[winner] = 0.5
                counts = counts + boost
            P[i] = counts / counts.sum()
        return P

    def _params_to_dict(self):
        return {"train_Z": self.train_Z.tolist(), "train_y": self.train_y.tolist()}

    def _params_from_dict(self, payload):
        self.train_Z = np.asarray(payload["train_Z"], dtype=np.float64)
        self.train_y = np.asarray(payload["train_y"], dtype=np.int64)
