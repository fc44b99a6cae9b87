"""Linear models: multinomial softmax regression and a one-vs-rest hinge SVM.

The logistic model trains by full-batch gradient descent with an L2
penalty on the weights (bias excluded) and exposes its loss/gradient pair
for finite-difference checks. The SVM trains per class with mini-batch
subgradient descent; its probabilities are a softmax over the margins,
a calibration-free surrogate needed because stacking consumes
probability vectors.
"""

from __future__ import annotations

import numpy as np

from icstwin.ml.base import ClassifierBase, one_hot, softmax


def _with_bias(Z: np.ndarray) -> np.ndarray:
    return np.hstack([Z, np.ones((len(Z), 1))])


def logistic_loss_and_grad(W: np.ndarray, Zb: np.ndarray, Y: np.ndarray, l2: float) -> tuple[float, np.ndarray]:
    """Mean cross-entropy plus 0.5*l2*||W||^2 (bias column excluded); analytic gradient."""
    n = len(Zb)
    P = softmax(Zb @ W.T)
    loss = -np.log((P * Y).sum(axis=1).clip(1e-300)).mean()
    reg = W.copy()
    reg[:, -1] = 0.0
    loss += 0.5 * l2 * (reg**2).sum()
    grad = (P - Y).T @ Zb / n + l2 * reg
    return float(loss), grad


class LogisticRegression(ClassifierBase):
    kind = "LR"

    @classmethod
    def default_hyperparams(cls) -> dict:
        return {"l2": 1e-3, "max_iters": 2000, "lr": 2.0, "grad_tol": 1e-6}

    def _fit(self, Z, y):
        hp = self.hyperparams
        Zb = _with_bias(Z)
        Y = one_hot(y, self.n_classes)
        W = np.zeros((self.n_classes, Zb.shape[1]))
        for _ in range(hp["max_iters"]):
            _, grad = logistic_loss_and_grad(W, Zb, Y, hp["l2"])
            if np.abs(grad).max() < hp["grad_tol"]:
                break
            W -= hp["lr"] * grad
        self.W = W

    def _proba(self, Z):
        return softmax(_with_bias(Z) @ self.W.T)

    def _params_to_dict(self):
        return {"W": self.W.tolist()}

    def _params_from_dict(self, payload):
        self.W = np.asarray(payload["W"], dtype=np.float64)


class LinearSvm(ClassifierBase):
    kind = "SVM"

    @classmethod
    def default_hyperparams(cls) -> dict:
        return {"epochs": 40, "batch_size": 64, "lr": 0.5, "l2": 1e-4}

    def _fit(self, Z, y):
        hp = self.hyperparams
        rng = np.random.default_rng(self.seed)
        Zb = _with_bias(Z)
        n, dim = Zb.shape
        targets = 2.0 * one_hot(y, self.n_classes) - 1.0  # +-1 per one-vs-rest problem
        W = np.zeros((self.n_classes, dim))
        for epoch in range(hp["epochs"]):
            lr = hp["lr"] / (1.0 + 0.2 * epoch)
            perm = rng.permutation(n)
            for start in range(0, n, hp["batch_size"]):
                idx = perm[start : start + hp["batch_size"]]
                Zbatch = Zb[idx]
                T = targets[idx]
                margins = Zbatch @ W.T
                active = (T * margins < 1.0).astype(np.float64)
                grad = -(active * T).T @ Zbatch / len(idx)
                grad[:, :-1] += hp["l2"] * W[:, :-1]
                W -= lr * grad
        self.W = W

    def _proba(self, Z):
        return softmax(_with_bias(Z) @ self.W.T)

    def _params_to_dict(self):
        return {"W": self.W.tolist()}

    def _params_from_dict(self, payload):
        self.W = np.asarray(payload["W"], dtype=np.float64)
