"""Random forest of CART trees: gini splits, bootstrap bags, majority vote.

Split selection follows a fixed deterministic convention so equal trees
are reproducible bit-for-bit from a seed:

* candidate thresholds are midpoints of consecutive distinct sorted
  feature values within the node,
* samples with ``x[f] <= threshold`` go left,
* the weighted-gini comparison uses the scaled integer form
  ``((nl^2 - sum cl^2) * nr + (nr^2 - sum cr^2) * nl) / (nl * nr)``
  whose operands are exact in float64 and whose single division is
  correctly rounded, so equal-impurity splits compare equal exactly,
* candidate features are scanned in ascending index order, thresholds
  ascending, and only a strictly smaller score replaces the incumbent,
* a node becomes a leaf when the best split does not strictly beat the
  parent score ``(n^2 - sum c^2) / n``; leaves predict the majority label
  with ties going to -1.
"""

from dataclasses import dataclass
from typing import List

import numpy as np


@dataclass
class ForestModel:
    trees: List[dict]
    n_features: int
    max_depth: int
    seed: int
    bootstrap: bool = True
    max_features: str = "sqrt"

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        votes = np.zeros(len(X), dtype=int)
        for tree in self.trees:
            votes += _tree_predict(tree, X)
        # Majority vote; an exact tie goes to the negative class.
        return np.where(votes > 0, 1, -1)

    def to_jsonable(self):
        return {
            "trees": self.trees,
            "n_features": self.n_features,
            "max_depth": self.max_depth,
            "seed": self.seed,
            "bootstrap": self.bootstrap,
            "max_features": self.max_features,
        }

    @staticmethod
    def from_jsonable(data):
        return ForestModel(
            trees=data["trees"],
            n_features=int(data["n_features"]),
            max_depth=int(data["max_depth"]),
            seed=int(data["seed"]),
            bootstrap=bool(data["bootstrap"]),
            max_features=data["max_features"],
        )


def _tree_predict(tree, X):
    out = np.empty(len(X), dtype=int)
    for i, row in enumerate(X):
        node = tree
        while not node["leaf"]:
            node = node["left"] if row[node["feature"]] <= node["threshold"] else node["right"]
        out[i] = node["label"]
    return out


def _leaf(n_neg, n_pos):
    return {"leaf": True, "label": 1 if n_pos > n_neg else -1}


def _best_split(X, y_pos, idx, features):
    """Best (score, feature, threshold) over the candidate features.

    ``y_pos`` is a boolean positive-class mask over all samples. Returns
    None when no feature admits a split.
    """
    n = len(idx)
    total_pos = int(y_pos[idx].sum())
    best = None
    for f in features:
        col = X[idx, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        boundary = np.flatnonzero(xs[:-1] != xs[1:])
        if len(boundary) == 0:
            continue
        pos_sorted = y_pos[idx][order].astype(np.int64)
        cum_pos = np.cumsum(pos_sorted)
        nl = (boundary + 1).astype(np.float64)
        nr = n - nl
        cl1 = cum_pos[boundary].astype(np.float64)
        cl0 = nl - cl1
        cr1 = total_pos - cl1
        cr0 = nr - cr1
        num = (nl * nl - cl0 * cl0 - cl1 * cl1) * nr + (nr * nr - cr0 * cr0 - cr1 * cr1) * nl
        scores = num / (nl * nr)
        j = int(np.argmin(scores))  # first minimum => smallest threshold
        score = float(scores[j])
        if best is None or score < best[0]:
            b = boundary[j]
            best = (score, int(f), float((xs[b] + xs[b + 1]) / 2.0))
    return best


def _build(X, y_pos, idx, depth, max_depth, rng, n_candidates):
    n_pos = int(y_pos[idx].sum())
    n_neg = len(idx) - n_pos
    if depth >= max_depth or n_pos == 0 or n_neg == 0 or len(idx) < 2:
        return _leaf(n_neg, n_pos)
    d = X.shape[1]
    if n_candidates >= d:
        features = range(d)
    else:
        features = np.sort(rng.choice(d, size=n_candidates, replace=False))
    best = _best_split(X, y_pos, idx, features)
    n = len(idx)
    parent = (n * n - n_neg * n_neg - n_pos * n_pos) / n
    if best is None or not best[0] < parent:
        return _leaf(n_neg, n_pos)
    _, f, t = best
    mask = X[idx, f] <= t
    return {
        "leaf": False,
        "feature": f,
        "threshold": t,
        "left": _build(X, y_pos, idx[mask], depth + 1, max_depth, rng, n_candidates),
        "right": _build(X, y_pos, idx[~mask], depth + 1, max_depth, rng, n_candidates),
    }


def train_forest(X, y, max_depth, n_trees=100, seed=0, bootstrap=True,
                 max_features="sqrt") -> ForestModel:
    """Fit a bagged CART ensemble.

    ``max_depth`` must lie in [1, 50]. ``max_features`` is "sqrt" (the
    forest default) or "all"; with ``n_trees=1, bootstrap=False,
    max_features="all"`` this reduces to a plain deterministic CART tree.
    A degenerate single-class input yields a constant classifier.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if not 1 <= max_depth <= 50:
        raise ValueError("max_depth must be in [1, 50]")
    if n_trees < 1:
        raise ValueError("need at least one tree")
    if max_features not in ("sqrt", "all"):
        raise ValueError(f"unknown max_features {max_features!r}")
    d = X.shape[1]
    n_candidates = d if max_features == "all" else max(1, int(np.sqrt(d)))

    y_pos = y == 1
    streams = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for child in streams:
        rng = np.random.default_rng(child)
        if bootstrap:
            idx = np.sort(rng.integers(0, len(y), size=len(y)))
        else:
            idx = np.arange(len(y))
        trees.append(_build(X, y_pos, idx, 0, max_depth, rng, n_candidates))
    return ForestModel(
        trees=trees,
        n_features=d,
        max_depth=int(max_depth),
        seed=int(seed),
        bootstrap=bootstrap,
        max_features=max_features,
    )
