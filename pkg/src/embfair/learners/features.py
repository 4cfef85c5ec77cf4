"""Bag-of-embeddings featurization: a note is the mean of its token vectors."""

from dataclasses import dataclass

import numpy as np

from ..corpus import SwapRules, tokenize
from ..metrics import NEGATIVE, POSITIVE

_PRONOUNS = SwapRules.default().gendered_tokens() | {"they", "them", "their", "themself"}


@dataclass(frozen=True)
class FeatureVector:
    """Mean of in-vocabulary token vectors with coverage counters.

    A note none of whose tokens are in the table gets an all-zero vector
    and is flagged through ``is_empty``.
    """

    values: np.ndarray
    n_tokens_used: int
    n_oov: int

    @property
    def is_empty(self):
        return self.n_tokens_used == 0


def featurize(note, table, strip_pronouns=False) -> FeatureVector:
    """Average the embedding vectors of a note's in-vocabulary tokens.

    ``strip_pronouns`` drops gendered and neutral pronouns before pooling;
    it exists for diagnostics only and is never used by the experiment
    pipeline.
    """
    tokens = [t.text for t in tokenize(note.text)]
    if strip_pronouns:
        tokens = [t for t in tokens if t.lower() not in _PRONOUNS]
    used, n_oov = [], 0
    for tok in tokens:
        vec = table.get(tok)
        if vec is None:
            n_oov += 1
        else:
            used.append(vec)
    if used:
        values = np.mean(used, axis=0)
    else:
        values = np.zeros(table.dim)
    values.setflags(write=False)
    return FeatureVector(values=values, n_tokens_used=len(used), n_oov=n_oov)


def design_matrix(notes, table, strip_pronouns=False):
    """Stack featurized notes into (X, y) with labels encoded +1/-1."""
    feats = [featurize(n, table, strip_pronouns) for n in notes]
    X = np.array([f.values for f in feats], dtype=float)
    y = np.array([POSITIVE if n.label == "depression" else NEGATIVE for n in notes], dtype=int)
    return X, y
