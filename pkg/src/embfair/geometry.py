"""Gender direction and Direct Bias over an embedding table.

The gender direction is the top principal component of the difference
vectors of definitional word pairs (she-he, her-his, ...). Direct Bias for
a target word list is the mean absolute cosine similarity between each
resolvable target and that direction; the sign of the mean (un-absolute)
cosine gives the bias direction, with the convention that the positive
side of the gender axis is female.
"""

import csv
import importlib.resources
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from .embeddings import resolve

log = logging.getLogger(__name__)

DIRECTION_EPS = 1e-9       # threshold on the mean signed cosine for F/M calls
DEGENERATE_TRACE = 1e-12   # below this the centered diffs carry no variance

ORIENTATION_CONVENTION = "positive side = female"


class GeometryError(ValueError):
    """Raised when the pair or target geometry is degenerate."""


@dataclass(frozen=True)
class GenderPair:
    female_word: str
    male_word: str

    def __post_init__(self):
        if not self.female_word or not self.male_word:
            raise ValueError("pair words must be non-empty")
        if self.female_word == self.male_word:
            raise ValueError("pair words must differ")


@dataclass(frozen=True)
class GenderDirection:
    """Unit gender axis with its explained-variance spectrum.

    ``spectrum`` holds min(n_pairs, dim) non-increasing ratios summing to
    one. The orientation invariant is that the mean cosine between ``g``
    and the female-minus-male difference vectors of ``pairs_used`` is
    non-negative.
    """

    g: np.ndarray
    spectrum: np.ndarray
    pairs_used: Tuple[GenderPair, ...]
    pairs_skipped: Tuple[GenderPair, ...] = ()
    orientation: str = ORIENTATION_CONVENTION


@dataclass(frozen=True)
class BiasScore:
    """Direct Bias of a target word list against a gender direction."""

    db: float
    direction: str  # F | M | neutral
    per_word: Dict[str, float]
    n_resolved: int
    n_missing: int

    def to_jsonable(self):
        return {
            "db": self.db,
            "direction": self.direction,
            "n_resolved": self.n_resolved,
            "n_missing": self.n_missing,
            "per_word": dict(self.per_word),
        }


def _pair_diffs(table, pairs, normalize_words):
    diffs, used, skipped = [], [], []
    for pair in pairs:
        rf = resolve(table, pair.female_word)
        rm = resolve(table, pair.male_word)
        if rf.vector is None or rm.vector is None:
            skipped.append(pair)
            continue
        vf, vm = np.asarray(rf.vector, float), np.asarray(rm.vector, float)
        if normalize_words:
            nf, nm = np.linalg.norm(vf), np.linalg.norm(vm)
            if nf == 0 or nm == 0:
                skipped.append(pair)
                continue
            vf, vm = vf / nf, vm / nm
        diffs.append(vf - vm)
        used.append(pair)
    return diffs, used, skipped


def gender_direction(table, pairs, center=True, normalize_words=False) -> GenderDirection:
    """Top principal component of the definitional-pair difference vectors.

    Difference vectors are mean-centered (``center=False`` for the
    uncentered sensitivity variant), the sample covariance is
    eigendecomposed on whichever of the Gram or covariance matrix is
    smaller, and the top eigenvector is re-oriented so its positive side is
    female. Pairs that do not fully resolve are skipped and recorded.

    Raises :class:`GeometryError` if fewer than two pairs resolve, or if
    the centered diffs carry no variance and the mean difference is zero.
    """
    diffs, used, skipped = _pair_diffs(table, pairs, normalize_words)
    if skipped:
        log.warning("skipped %d unresolvable gender pair(s)", len(skipped))
    if len(diffs) < 2:
        raise GeometryError(f"only {len(diffs)} gender pair(s) resolved; need at least 2")

    d_mat = np.array(diffs, dtype=float)
    n, dim = d_mat.shape
    k = min(n, dim)
    mean_diff = d_mat.mean(axis=0)
    centered = d_mat - mean_diff if center else d_mat

    trace = float((centered**2).sum())
    if trace <= DEGENERATE_TRACE:
        # All (centered) diffs coincide: the only signal left is the mean
        # difference itself.
        norm = float(np.linalg.norm(mean_diff))
        if norm <= DEGENERATE_TRACE:
            raise GeometryError("degenerate pair geometry: no gender signal")
        g = mean_diff / norm
        spectrum = np.zeros(k)
        spectrum[0] = 1.0
    else:
        if dim <= n:
            scatter = centered.T @ centered
            vals, vecs = np.linalg.eigh(scatter)
            order = np.argsort(vals)[::-1]
            vals = vals[order]
            g = vecs[:, order[0]]
        else:
            gram = centered @ centered.T
            vals, vecs = np.linalg.eigh(gram)
            order = np.argsort(vals)[::-1]
            vals = vals[order]
            g = centered.T @ vecs[:, order[0]]
        vals = np.clip(vals, 0.0, None)
        g = g / np.linalg.norm(g)
        spectrum = vals[:k] / vals.sum()

    # Break the eigenvector sign ambiguity: the female word leads in every
    # difference, so g must point (on average) the same way as the diffs.
    signed = [float(d @ g) / nd for d in d_mat if (nd := float(np.linalg.norm(d))) > 0]
    if signed and float(np.mean(signed)) < 0:
        g = -g

    g = np.asarray(g, dtype=float)
    g.setflags(write=False)
    spectrum.setflags(write=False)
    return GenderDirection(
        g=g, spectrum=spectrum, pairs_used=tuple(used), pairs_skipped=tuple(skipped)
    )


def direct_bias(table, direction, targets, strictness=1.0) -> BiasScore:
    """Mean absolute cosine similarity between targets and the gender axis.

    Targets are resolved through the phrase fallback chain; unresolvable
    terms are counted, never imputed. ``strictness`` exponentiates the
    absolute cosines (the classical definition's c parameter), default 1.

    Raises :class:`GeometryError` if no target resolves or a resolved
    vector has zero norm.
    """
    g = np.asarray(direction.g, dtype=float)
    per_word: Dict[str, float] = {}
    n_missing = 0
    for term in targets:
        if term in per_word:
            continue
        res = resolve(table, term)
        if res.vector is None:
            n_missing += 1
            continue
        vec = np.asarray(res.vector, dtype=float)
        norm = float(np.linalg.norm(vec))
        if norm <= 1e-300:
            raise GeometryError(f"target {term!r} resolved to a zero-norm vector")
        per_word[term] = float(vec @ g) / norm
    if not per_word:
        raise GeometryError("no target term resolved against the table")

    signed = np.array(list(per_word.values()))
    db = float(np.mean(np.abs(signed) ** strictness))
    mean_signed = float(np.mean(signed))
    if mean_signed > DIRECTION_EPS:
        bias_dir = "F"
    elif mean_signed < -DIRECTION_EPS:
        bias_dir = "M"
    else:
        bias_dir = "neutral"
    return BiasScore(
        db=db,
        direction=bias_dir,
        per_word=per_word,
        n_resolved=len(per_word),
        n_missing=n_missing,
    )


def spectrum_report(direction) -> List[Tuple[int, float]]:
    """Explained-variance ratios as (1-based component index, ratio) rows,
    sorted in descending ratio order."""
    ratios = sorted((float(r) for r in direction.spectrum), reverse=True)
    return [(i + 1, r) for i, r in enumerate(ratios)]


def write_spectrum_csv(direction, path):
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["component", "explained_variance_ratio"])
        for idx, ratio in spectrum_report(direction):
            writer.writerow([idx, repr(ratio)])


# ---------------------------------------------------------------------------
# List files: definitional pairs (two-column TSV) and target terms
# ---------------------------------------------------------------------------

def load_gender_pairs(path) -> List[GenderPair]:
    """Read a two-column TSV of ``female_word<TAB>male_word`` rows."""
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: expected two tab-separated words")
        pairs.append(GenderPair(fields[0].strip(), fields[1].strip()))
    if not pairs:
        raise ValueError(f"{path}: no pairs found")
    return pairs


def load_terms(path) -> List[str]:
    """Read a one-term-per-line target list (blank lines and # comments skipped)."""
    terms = [
        line.strip()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    if not terms:
        raise ValueError(f"{path}: no terms found")
    return terms


def default_gender_pairs() -> List[GenderPair]:
    """The ten definitional pairs shipped with the package."""
    ref = importlib.resources.files("embfair.data").joinpath("definitional_pairs.tsv")
    with importlib.resources.as_file(ref) as path:
        return load_gender_pairs(path)


def default_target_terms() -> List[str]:
    """Default depression-synonym target list (user-replaceable)."""
    ref = importlib.resources.files("embfair.data").joinpath("depression_terms.txt")
    with importlib.resources.as_file(ref) as path:
        return load_terms(path)
