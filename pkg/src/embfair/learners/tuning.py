"""Hyperparameter grids, stratified 3-fold cross-validation, model wrapper.

Selection maximizes mean macro-F1 across folds. Ties are broken toward
the simpler model: smaller C for the SVM, shallower trees for the forest,
stronger regularization (larger alpha) for the MLP. That ordering is
realized by enumerating grid points in tie-break order and replacing the
incumbent only on a strictly better score.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from ..metrics import macro_f1
from .forest import ForestModel, train_forest
from .mlp import MLPModel, train_mlp
from .svm import SVMModel, train_svm

log = logging.getLogger(__name__)

LEARNER_KINDS = ("svm", "rf", "mlp")
MODEL_JSON_VERSION = 1

_MODEL_CLASSES = {"svm": SVMModel, "rf": ForestModel, "mlp": MLPModel}


@dataclass(frozen=True)
class HyperparamGrid:
    """Search spaces for the three learners.

    Defaults: C over exponential steps {0.01, 0.1, 1, 10, 100} with the
    three kernels; tree depth over a thinned [1, 50] ladder (use
    ``full_depth=True`` for every integer); MLP alpha over {0.1, 0.3, 1,
    3, 10}. All values are validated against their allowed ranges.
    """

    svm_C: Tuple[float, ...] = (0.01, 0.1, 1.0, 10.0, 100.0)
    svm_kernels: Tuple[str, ...] = ("rbf", "sigmoid", "linear")
    rf_max_depth: Tuple[int, ...] = (1, 2, 3, 5, 8, 12, 18, 27, 38, 50)
    mlp_alpha: Tuple[float, ...] = (0.1, 0.3, 1.0, 3.0, 10.0)

    def __post_init__(self):
        if not (self.svm_C and self.svm_kernels and self.rf_max_depth and self.mlp_alpha):
            raise ValueError("grids must be non-empty")
        if any(not 0.01 <= c <= 100.0 for c in self.svm_C):
            raise ValueError("svm C values must lie in [0.01, 100]")
        if any(k not in ("rbf", "sigmoid", "linear") for k in self.svm_kernels):
            raise ValueError("unknown svm kernel in grid")
        if any(not 1 <= d <= 50 for d in self.rf_max_depth):
            raise ValueError("rf max_depth values must lie in [1, 50]")
        if any(not 0.1 <= a <= 10.0 for a in self.mlp_alpha):
            raise ValueError("mlp alpha values must lie in [0.1, 10]")

    @staticmethod
    def with_full_depth() -> "HyperparamGrid":
        return HyperparamGrid(rf_max_depth=tuple(range(1, 51)))

    def points(self, kind) -> List[Dict]:
        """Grid points in tie-break order (preferred point first)."""
        if kind == "svm":
            return [
                {"C": float(c), "kernel": k}
                for c in sorted(self.svm_C)
                for k in self.svm_kernels
            ]
        if kind == "rf":
            return [{"max_depth": int(d)} for d in sorted(self.rf_max_depth)]
        if kind == "mlp":
            return [{"alpha": float(a)} for a in sorted(self.mlp_alpha, reverse=True)]
        raise ValueError(f"unknown learner kind {kind!r}")


@dataclass
class TrainedModel:
    """A fitted learner with its provenance (kind, hyperparameters, seed)."""

    kind: str
    hyperparams: Dict
    model: object
    seed: int
    cv_scores: Dict = field(default_factory=dict)

    def predict(self, X):
        return self.model.predict(X)

    def save_json(self, path):
        payload = {
            "version": MODEL_JSON_VERSION,
            "kind": self.kind,
            "hyperparams": self.hyperparams,
            "seed": self.seed,
            "params": self.model.to_jsonable(),
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")

    @staticmethod
    def load_json(path) -> "TrainedModel":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.get("version") != MODEL_JSON_VERSION:
            raise ValueError(f"unsupported model file version {data.get('version')!r}")
        kind = data["kind"]
        if kind not in _MODEL_CLASSES:
            raise ValueError(f"unknown learner kind {kind!r}")
        model = _MODEL_CLASSES[kind].from_jsonable(data["params"])
        return TrainedModel(
            kind=kind,
            hyperparams=data["hyperparams"],
            model=model,
            seed=int(data["seed"]),
        )


def child_seed(seed, *tags) -> int:
    """Stable derived seed for a (seed, tag...) stream."""
    entropy = [int(seed) & 0xFFFFFFFF]
    for tag in tags:
        if isinstance(tag, str):
            entropy.extend(ord(c) for c in tag)
        else:
            entropy.append(int(tag) & 0xFFFFFFFF)
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def stratified_folds(y, n_folds, seed) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Deterministic stratified folds as (train_idx, val_idx) pairs."""
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(y), dtype=int)
    for cls in np.unique(y):
        members = np.flatnonzero(y == cls)
        if len(members) < n_folds:
            raise ValueError(
                f"class {cls} has {len(members)} samples; need >= {n_folds} for {n_folds}-fold CV"
            )
        members = rng.permutation(members)
        assignment[members] = np.arange(len(members)) % n_folds
    folds = []
    for f in range(n_folds):
        val = np.flatnonzero(assignment == f)
        train = np.flatnonzero(assignment != f)
        folds.append((train, val))
    return folds


def fit_one(kind, X, y, params, seed) -> object:
    if kind == "svm":
        return train_svm(X, y, C=params["C"], kernel=params["kernel"])
    if kind == "rf":
        return train_forest(X, y, max_depth=params["max_depth"], seed=seed)
    if kind == "mlp":
        return train_mlp(X, y, alpha=params["alpha"], seed=seed)
    raise ValueError(f"unknown learner kind {kind!r}")


def tune(X, y, kind, grid=None, seed=0, n_folds=3) -> TrainedModel:
    """Grid search by stratified cross-validation, then refit on all data.

    Per-fold training seeds are derived from (seed, fold, grid index) so
    evaluation order cannot affect the selected model.
    """
    grid = grid or HyperparamGrid()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    folds = stratified_folds(y, n_folds, child_seed(seed, "folds"))
    points = grid.points(kind)

    best_idx, best_score = 0, -np.inf
    scores = []
    for gi, params in enumerate(points):
        fold_scores = []
        for fi, (tr, va) in enumerate(folds):
            model = fit_one(kind, X[tr], y[tr], params, child_seed(seed, fi, gi))
            fold_scores.append(macro_f1(y[va], model.predict(X[va])))
        mean_score = float(np.mean(fold_scores))
        scores.append(mean_score)
        if mean_score > best_score:
            best_idx, best_score = gi, mean_score
    chosen = points[best_idx]
    log.debug("tune(%s): chose %s with CV macro-F1 %.4f", kind, chosen, best_score)
    final = fit_one(kind, X, y, chosen, child_seed(seed, "refit", best_idx))
    return TrainedModel(
        kind=kind,
        hyperparams=dict(chosen),
        model=final,
        seed=int(seed),
        cv_scores={"mean_macro_f1": best_score,
                   "grid": [{"params": p, "score": s} for p, s in zip(points, scores)]},
    )
