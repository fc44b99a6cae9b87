"""Single-hidden-layer tanh network with softmax output and cross-entropy loss.

Used both as the ANN classifier kind (32 hidden units) and as the stacking
meta-learner (16 hidden units over concatenated base probabilities).
Training is full-batch gradient descent with momentum from a seeded
uniform init; the loss/gradient pair is exposed for finite-difference
checks.
"""

from __future__ import annotations

import numpy as np

from icstwin.ml.base import ClassifierBase, one_hot, softmax


def mlp_unpack(theta: np.ndarray, d: int, h: int, C: int):
    i = 0
    W1 = theta[i : i + d * h].reshape(d, h); i += d * h
    b1 = theta[i : i + h]; i += h
    W2 = theta[i : i + h * C].reshape(h, C); i += h * C
    b2 = theta[i : i + C]
    return W1, b1, W2, b2


def mlp_loss_and_grad(theta: np.ndarray, Z: np.ndarray, Y: np.ndarray, h: int, l2: float = 0.0) -> tuple[float, np.ndarray]:
    """Mean cross-entropy of the tanh MLP plus 0.5*l2*||W||^2 (biases excluded)."""
    n, d = Z.shape
    C = Y.shape[1]
    W1, b1, W2, b2 = mlp_unpack(theta, d, h, C)
    A = np.tanh(Z @ W1 + b1)
    P = softmax(A @ W2 + b2)
    loss = float(-np.log((P * Y).sum(axis=1).clip(1e-300)).mean())
    loss += 0.5 * l2 * float((W1**2).sum() + (W2**2).sum())
    dscores = (P - Y) / n
    gW2 = A.T @ dscores + l2 * W2
    gb2 = dscores.sum(axis=0)
    dA = dscores @ W2.T * (1.0 - A**2)
    gW1 = Z.T @ dA + l2 * W1
    gb1 = dA.sum(axis=0)
    grad = np.concatenate([gW1.ravel(), gb1, gW2.ravel(), gb2])
    return loss, grad


class MlpClassifier(ClassifierBase):
    kind = "ANN"

    @classmethod
    def default_hyperparams(cls) -> dict:
        return {"hidden": 32, "max_iters": 2000, "lr": 0.5, "momentum": 0.9, "l2": 0.0}

    def _fit(self, Z, y):
        hp = self.hyperparams
        d, h, C = Z.shape[1], hp["hidden"], self.n_classes
        rng = np.random.default_rng(self.seed)
        n_params = d * h + h + h * C + C
        limits = np.concatenate(
            [
                np.full(d * h, 1.0 / np.sqrt(d)),
                np.zeros(h),
                np.full(h * C, 1.0 / np.sqrt(h)),
                np.zeros(C),
            ]
        )
        theta = rng.uniform(-1.0, 1.0, size=n_params) * limits
        Y = one_hot(y, C)
        velocity = np.zeros_like(theta)
        for _ in range(hp["max_iters"]):
            _, grad = mlp_loss_and_grad(theta, Z, Y, h, hp["l2"])
            velocity = hp["momentum"] * velocity - hp["lr"] * grad
            theta = theta + velocity
        self.theta = theta

    def _proba(self, Z):
        W1, b1, W2, b2 = mlp_unpack(self.theta, Z.shape[1], self.hyperparams["hidden"], self.n_classes)
        A = np.tanh(Z @ W1 + b1)
        return softmax(A @ W2 + b2)

    def _params_to_dict(self):
        return {"theta": self.theta.tolist()}

    def _params_from_dict(self, payload):
        self.theta = np.asarray(payload["theta"], dtype=np.float64)
