"""Soft-margin kernel SVM trained with sequential minimal optimization.

The dual problem is solved pair-by-pair (Platt-style working set with an
error cache). Training stops when a full pass finds no KKT violation
beyond ``tol``, so every accepted model satisfies the KKT conditions to
that tolerance. Iteration order is fixed, making training deterministic
without any RNG.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

log = logging.getLogger(__name__)

KERNELS = ("linear", "rbf", "sigmoid")

_EPS = 1e-12
_SNAP = 1e-10  # multipliers within this of a box bound are snapped onto it


def resolve_gamma(X, gamma=None):
    """Default kernel width 1 / (dim * var(X)); 1/dim for constant data."""
    if gamma is not None:
        return float(gamma)
    var = float(np.asarray(X).var())
    d = X.shape[1]
    return 1.0 / (d * var) if var > 0 else 1.0 / d


def kernel_matrix(A, B, kernel, gamma, coef0=0.0):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if kernel == "linear":
        return A @ B.T
    if kernel == "rbf":
        sq = (A**2).sum(axis=1)[:, None] + (B**2).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
        return np.exp(-gamma * np.clip(sq, 0.0, None))
    if kernel == "sigmoid":
        return np.tanh(gamma * (A @ B.T) + coef0)
    raise ValueError(f"unknown kernel {kernel!r}")


@dataclass
class SVMModel:
    kernel: str
    gamma: float
    coef0: float
    C: float
    support_vectors: np.ndarray
    support_y: np.ndarray
    alphas: np.ndarray
    bias: float
    converged: bool = True
    objective_history: Optional[List[float]] = None
    support_idx: Optional[np.ndarray] = None  # positions in the training set

    def decision_function(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        k = kernel_matrix(X, self.support_vectors, self.kernel, self.gamma, self.coef0)
        return k @ (self.alphas * self.support_y) + self.bias

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0.0, 1, -1)

    def to_jsonable(self):
        return {
            "kernel": self.kernel,
            "gamma": self.gamma,
            "coef0": self.coef0,
            "C": self.C,
            "support_vectors": self.support_vectors.tolist(),
            "support_y": self.support_y.tolist(),
            "alphas": self.alphas.tolist(),
            "bias": self.bias,
            "converged": self.converged,
        }

    @staticmethod
    def from_jsonable(data):
        return SVMModel(
            kernel=data["kernel"],
            gamma=float(data["gamma"]),
            coef0=float(data["coef0"]),
            C=float(data["C"]),
            support_vectors=np.array(data["support_vectors"], dtype=float),
            support_y=np.array(data["support_y"], dtype=float),
            alphas=np.array(data["alphas"], dtype=float),
            bias=float(data["bias"]),
            converged=bool(data.get("converged", True)),
        )


class _SMO:
    def __init__(self, K, y, C, tol, track_objective):
        self.K = K
        self.y = y.astype(float)
        self.C = C
        self.tol = tol
        n = len(y)
        self.alpha = np.zeros(n)
        self.b = 0.0
        # f[i] = decision value at sample i; maintained incrementally.
        self.f = np.full(n, self.b)
        self.history = [] if track_objective else None

    def errors(self):
        return self.f - self.y

    def objective(self):
        ay = self.alpha * self.y
        return float(self.alpha.sum() - 0.5 * ay @ self.K @ ay)

    def take_step(self, i1, i2):
        if i1 == i2:
            return False
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1 = self.f[i1] - y1
        e2 = self.f[i2] - y2
        s = y1 * y2
        if s < 0:
            L, H = max(0.0, a2 - a1), min(self.C, self.C + a2 - a1)
        else:
            L, H = max(0.0, a1 + a2 - self.C), min(self.C, a1 + a2)
        if L >= H - _EPS:
            return False
        k11, k12, k22 = self.K[i1, i1], self.K[i1, i2], self.K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > _EPS:
            a2_new = a2 + y2 * (e1 - e2) / eta
            a2_new = min(max(a2_new, L), H)
        else:
            # Non-positive curvature (possible for the sigmoid kernel):
            # evaluate the subproblem objective at both clip bounds.
            f1 = y1 * e1 - a1 * k11 - s * a2 * k12
            f2 = y2 * e2 - s * a1 * k12 - a2 * k22
            L1 = a1 + s * (a2 - L)
            H1 = a1 + s * (a2 - H)
            psi_l = L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11 + 0.5 * L * L * k22 + s * L * L1 * k12
            psi_h = H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11 + 0.5 * H * H * k22 + s * H * H1 * k12
            if psi_l < psi_h - _EPS:
                a2_new = L
            elif psi_l > psi_h + _EPS:
                a2_new = H
            else:
                return False
        if abs(a2_new - a2) < _EPS * (a2_new + a2 + _EPS):
            return False
        if a2_new < _SNAP:
            a2_new = 0.0
        elif a2_new > self.C - _SNAP:
            a2_new = self.C
        a1_new = a1 + s * (a2 - a2_new)
        if a1_new < _SNAP:
            a1_new = 0.0
        elif a1_new > self.C - _SNAP:
            a1_new = self.C

        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        b1 = self.b - e1 - d1 * k11 - d2 * k12
        b2 = self.b - e2 - d1 * k12 - d2 * k22
        if 0.0 < a1_new < self.C:
            b_new = b1
        elif 0.0 < a2_new < self.C:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0

        self.f += d1 * self.K[:, i1] + d2 * self.K[:, i2] + (b_new - self.b)
        self.alpha[i1], self.alpha[i2] = a1_new, a2_new
        self.b = b_new
        if self.history is not None:
            self.history.append(self.objective())
        return True

    def examine(self, i2):
        y2, a2 = self.y[i2], self.alpha[i2]
        r2 = (self.f[i2] - y2) * y2
        if not ((r2 < -self.tol and a2 < self.C) or (r2 > self.tol and a2 > 0.0)):
            return False
        nonbound = np.flatnonzero((self.alpha > 0.0) & (self.alpha < self.C))
        if len(nonbound) > 1:
            e = self.errors()
            i1 = int(nonbound[np.argmax(np.abs(e[nonbound] - e[i2]))])
            if self.take_step(i1, i2):
                return True
        for i1 in nonbound:
            if self.take_step(int(i1), i2):
                return True
        for i1 in range(len(self.y)):
            if self.take_step(i1, i2):
                return True
        return False

    def solve(self, max_passes):
        examine_all = True
        num_changed = 0
        passes = 0
        while (num_changed > 0 or examine_all) and passes < max_passes:
            passes += 1
            num_changed = 0
            if examine_all:
                for i in range(len(self.y)):
                    num_changed += self.examine(i)
            else:
                for i in np.flatnonzero((self.alpha > 0.0) & (self.alpha < self.C)):
                    num_changed += self.examine(int(i))
            if examine_all:
                examine_all = False
            elif num_changed == 0:
                examine_all = True
                num_changed = 1  # force one final full pass
        converged = passes < max_passes
        if not converged:
            log.warning("SMO hit the pass bound (%d) before clearing all KKT violations", max_passes)
        return converged


def train_svm(X, y, C, kernel="rbf", gamma=None, coef0=0.0, tol=1e-3,
              max_passes=10_000, track_objective=False) -> SVMModel:
    """Fit a binary soft-margin SVM by SMO.

    ``y`` must be +1/-1 with both classes present; ``gamma`` defaults to
    1/(dim*var(X)). The returned model keeps only the support vectors.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if C <= 0:
        raise ValueError("C must be positive")
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    classes = np.unique(y)
    if not np.array_equal(np.sort(classes), [-1, 1]):
        raise ValueError("labels must be +1/-1 with both classes present")

    gamma = resolve_gamma(X, gamma)
    K = kernel_matrix(X, X, kernel, gamma, coef0)
    smo = _SMO(K, y, float(C), float(tol), track_objective)
    converged = smo.solve(max_passes)

    support = np.flatnonzero(smo.alpha > 0.0)
    if len(support) == 0:
        # All multipliers at zero: decision function is the constant bias.
        support = np.array([0])
    return SVMModel(
        kernel=kernel,
        gamma=gamma,
        coef0=float(coef0),
        C=float(C),
        support_vectors=X[support].copy(),
        support_y=y[support].astype(float),
        alphas=smo.alpha[support].copy(),
        bias=float(smo.b),
        converged=converged,
        objective_history=smo.history,
        support_idx=support.copy(),
    )


def kkt_residual(model, X, y):
    """Worst-case violation of the KKT optimality conditions on the
    training set (X, y).

    For each sample: margin >= 1 - r when alpha = 0, |margin - 1| <= r
    when 0 < alpha < C, margin <= 1 + r when alpha = C. Returns the
    smallest r consistent with the model, which is <= the training
    tolerance for a converged fit.
    """
    if model.support_idx is None:
        raise ValueError("model was not trained in this process; support indices unknown")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    margins = y * model.decision_function(X)
    alpha = np.zeros(len(y))
    alpha[model.support_idx] = model.alphas
    resid = 0.0
    for m, a in zip(margins, alpha):
        if a <= 0.0:
            resid = max(resid, 1.0 - m)
        elif a >= model.C:
            resid = max(resid, m - 1.0)
        else:
            resid = max(resid, abs(m - 1.0))
    return float(resid)
