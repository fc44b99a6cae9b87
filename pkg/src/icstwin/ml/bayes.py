"""Gaussian naive Bayes with per-class/feature variances floored at 1e-9."""

from __future__ import annotations

import math

import numpy as np

from icstwin.ml.base import ClassifierBase

VAR_FLOOR = 1e-9


class GaussianNaiveBayes(ClassifierBase):
    kind = "NB"

    @classmethod
    def default_hyperparams(cls) -> dict:
        return {"var_floor": VAR_FLOOR}

    def _fit(self, Z, y):
        C, d = self.n_classes, Z.shape[1]
        self.means = np.zeros((C, d))
        self.vars = np.zeros((C, d))
        self.priors = np.zeros(C)
        for c in range(C):
            rows = Z[y == c]
            self.priors[c] = len(rows) / len(Z)
            self.means[c] = rows.mean(axis=0)
            self.vars[c] = np.maximum(rows.var(axis=0), self.hyperparams["var_floor"])

    def _proba(self, Z):
        # log posterior up to a constant, normalized by logsumexp
        log_prior = np.log(self.priors)
        log_like = -0.5 * (
            np.log(2.0 * math.pi * self.vars)[None, :, :]
            + (Z[:, None, :] - self.means[None, :, :]) ** 2 / self.vars[None, :, :]
        ).sum(axis=2)
        log_post = log_prior[None, :] + log_like
        log_post -= log_post.max(axis=1, keepdims=True)
        P = np.exp(log_post)
        return P / P.sum(axis=1, keepdims=True)

    def _params_to_dict(self):
        return {"priors": self.priors.tolist(), "means": self.means.tolist(), "vars": self.vars.tolist()}

    def _params_from_dict(self, payload):
        self.priors = np.asarray(payload["priors"], dtype=np.float64)
        self.means = np.asarray(payload["means"], dtype=np.float64)
        self.vars = np.asarray(payload["vars"], dtype=np.float64)
