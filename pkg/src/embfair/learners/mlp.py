"""One-hidden-layer perceptron: ReLU hidden units, sigmoid output, BCE loss
with an L2 weight penalty, trained by mini-batch Adam.

The training schedule is fixed: batch size 32, at most 500 epochs, early
stop once the full-data loss has failed to improve by more than 1e-5 for
10 consecutive epochs. All randomness (init, shuffling) comes from the
seed, so training is reproducible.
"""

from dataclasses import dataclass

import numpy as np

BATCH_SIZE = 32
MAX_EPOCHS = 500
PLATEAU_TOL = 1e-5
PLATEAU_PATIENCE = 10
LEARNING_RATE = 1e-3
ADAM_BETA1, ADAM_BETA2, ADAM_EPS = 0.9, 0.999, 1e-8


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softplus(z):
    # log(1 + e^z), stable for large |z|
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


@dataclass
class MLPModel:
    w1: np.ndarray  # (dim, hidden)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden, 1)
    b2: np.ndarray  # (1,)
    alpha: float
    seed: int
    n_epochs: int = 0
    final_loss: float = float("nan")

    def scores(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        hidden = np.maximum(X @ self.w1 + self.b1, 0.0)
        return _sigmoid(hidden @ self.w2 + self.b2).ravel()

    def predict(self, X):
        return np.where(self.scores(X) >= 0.5, 1, -1)

    def to_jsonable(self):
        return {
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2.tolist(),
            "alpha": self.alpha,
            "seed": self.seed,
            "n_epochs": self.n_epochs,
            "final_loss": self.final_loss,
        }

    @staticmethod
    def from_jsonable(data):
        return MLPModel(
            w1=np.array(data["w1"], dtype=float),
            b1=np.array(data["b1"], dtype=float),
            w2=np.array(data["w2"], dtype=float),
            b2=np.array(data["b2"], dtype=float),
            alpha=float(data["alpha"]),
            seed=int(data["seed"]),
            n_epochs=int(data.get("n_epochs", 0)),
            final_loss=float(data.get("final_loss", "nan")),
        )


def loss_and_grads(params, X, t, alpha, n_total):
    """Objective and analytic gradients for a batch.

    The objective is mean binary cross-entropy over the batch plus
    ``alpha/(2*n_total) * sum(w^2)`` over both weight matrices (biases are
    not penalized). ``t`` holds 0/1 targets.
    """
    w1, b1, w2, b2 = params
    batch = len(t)
    z1 = X @ w1 + b1
    a1 = np.maximum(z1, 0.0)
    z2 = (a1 @ w2 + b2).ravel()
    p = _sigmoid(z2)

    bce = float(np.mean(_softplus(z2) - t * z2))
    penalty = alpha / (2.0 * n_total) * (float((w1**2).sum()) + float((w2**2).sum()))
    loss = bce + penalty

    dz2 = ((p - t) / batch)[:, None]
    gw2 = a1.T @ dz2 + (alpha / n_total) * w2
    gb2 = dz2.sum(axis=0)
    da1 = dz2 @ w2.T
    dz1 = da1 * (z1 > 0.0)
    gw1 = X.T @ dz1 + (alpha / n_total) * w1
    gb1 = dz1.sum(axis=0)
    return loss, (gw1, gb1, gw2, gb2)


def train_mlp(X, y, alpha, seed=0, hidden=100, lr=LEARNING_RATE,
              batch_size=BATCH_SIZE, max_epochs=MAX_EPOCHS) -> MLPModel:
    """Fit the dim -> hidden(ReLU) -> 1(sigmoid) network.

    ``y`` must be +1/-1 with both classes present; ``alpha`` is the L2
    strength. Raises FloatingPointError if the loss goes non-finite.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if len(np.unique(y)) < 2:
        raise ValueError("labels must contain both classes")
    t = (y > 0).astype(float)
    n, dim = X.shape

    rng = np.random.default_rng(seed)
    w1 = rng.normal(0.0, np.sqrt(2.0 / dim), size=(dim, hidden))
    b1 = np.zeros(hidden)
    w2 = rng.normal(0.0, np.sqrt(1.0 / hidden), size=(hidden, 1))
    b2 = np.zeros(1)
    params = [w1, b1, w2, b2]
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]

    best_loss = np.inf
    stall = 0
    step = 0
    epochs_run = 0
    loss = np.inf
    for epoch in range(max_epochs):
        order = rng.permutation(n)
        for lo in range(0, n, batch_size):
            batch = order[lo : lo + batch_size]
            _, grads = loss_and_grads(params, X[batch], t[batch], alpha, n)
            step += 1
            for i, g in enumerate(grads):
                m[i] = ADAM_BETA1 * m[i] + (1 - ADAM_BETA1) * g
                v[i] = ADAM_BETA2 * v[i] + (1 - ADAM_BETA2) * g * g
                mhat = m[i] / (1 - ADAM_BETA1**step)
                vhat = v[i] / (1 - ADAM_BETA2**step)
                params[i] -= lr * mhat / (np.sqrt(vhat) + ADAM_EPS)
        loss, _ = loss_and_grads(params, X, t, alpha, n)
        epochs_run = epoch + 1
        if not np.isfinite(loss):
            raise FloatingPointError(f"non-finite loss at epoch {epochs_run}")
        if loss < best_loss - PLATEAU_TOL:
            best_loss = loss
            stall = 0
        else:
            stall += 1
            if stall >= PLATEAU_PATIENCE:
                break

    return MLPModel(
        w1=params[0], b1=params[1], w2=params[2], b2=params[3],
        alpha=float(alpha), seed=int(seed), n_epochs=epochs_run,
        final_loss=float(loss),
    )
