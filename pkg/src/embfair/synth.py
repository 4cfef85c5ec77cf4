"""Synthetic corpus and embedding fixtures with a planted, tunable bias.

Real clinical notes and the multi-gigabyte pretrained tables cannot ship
with the repository, so tests and demos run on generated stand-ins whose
geometry is controlled:

* axis 0 of the embedding space carries the class signal: depression-family
  tokens point one way, none-family tokens the other;
* axis 1 carries gender: female pronouns (and the definitional-pair words)
  point positive, male ones negative;
* ``strength`` leans the gendered words into the class axis — female
  vectors toward the depression pole — which is exactly the kind of
  correlation Direct Bias detects (direction F) and which a trained
  classifier can pick up through the pronouns of a note.

At strength 0 the gender axis is orthogonal to the class signal, so a
model has nothing gendered to exploit and the paired evaluation comes out
at parity. At strength 1 an original-condition model favors
female-presenting notes (lower FNR), while augmented training lets the
model cancel the pronoun displacement and restores parity.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .corpus import LabeledNote
from .embeddings import EmbeddingTable
from .geometry import GenderPair

FEMALE_FORMS = ["she", "her", "hers", "herself"]
MALE_FORMS = ["he", "him", "his", "himself"]
NEUTRAL_FORMS = ["they", "them", "their", "themself"]

# The ten definitional pairs, female word first.
PAIR_WORDS = [
    ("woman", "man"), ("girl", "boy"), ("she", "he"), ("mother", "father"),
    ("daughter", "son"), ("gal", "guy"), ("female", "male"), ("her", "his"),
    ("herself", "himself"), ("mary", "john"),
]


@dataclass(frozen=True)
class SynthSpec:
    """Knobs of the generator; defaults give the calibrated test fixture.

    ``strength`` couples gender to the class signal in two places at once:
    the definitional-pair words lean into the class axis (which is what
    Direct Bias reads out), and the recognizability of depression notes
    becomes gender-dependent (which is what an original-condition
    classifier learns to exploit through the pronoun vectors). Both
    couplings vanish at strength 0, where the pronoun vectors also shrink
    to jitter so the features carry no usable gender trace.
    """

    n_per_cell: int = 70        # notes per (label, gender) cell
    dim: int = 8
    strength: float = 1.0      # gender-signal correlation, in [0, 1]
    seed: int = 0
    class_scale: float = 1.0   # signal-token magnitude on axis 0
    gender_scale: float = 1.0  # gendered-token magnitude on axis 1
    lean_scale: float = 0.6    # class-axis lean of the pair words at strength 1
    jitter: float = 0.01       # per-word gaussian fuzz
    filler_scale: float = 0.25
    n_signal_words: int = 20   # per family
    n_filler_words: int = 40
    signal_purity: float = 0.72   # P(token drawn from the note's own family)
    hardness_delta: float = 0.15  # gender-dependent purity shift of depression notes
    include_gendered: bool = True  # drop pronouns from the table when False

    def __post_init__(self):
        if self.dim < 3:
            raise ValueError("need dim >= 3")
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError("strength must lie in [0, 1]")
        if self.n_per_cell < 1:
            raise ValueError("n_per_cell must be positive")
        if not 0.5 < self.signal_purity <= 1.0:
            raise ValueError("signal_purity must lie in (0.5, 1]")

    def purity(self, label, gender) -> float:
        """Own-family sampling probability for one note.

        With strength, female depression notes drift harder (weaker signal)
        and male ones easier; none notes are unaffected. An
        original-condition model therefore learns to lower the evidence bar
        for female-presenting notes, which at evaluation time means fewer
        missed female positives (advantaged group F). Augmentation shows
        every note under both pronoun sets and removes the association.
        """
        if label != "depression":
            return self.signal_purity
        shift = self.strength * self.hardness_delta
        return self.signal_purity - (shift if gender == "F" else -shift)


@dataclass(frozen=True)
class SynthFixture:
    notes: List[LabeledNote]
    table: EmbeddingTable
    pairs: List[GenderPair]
    targets: List[str]


def _signal_words(spec) -> Tuple[List[str], List[str]]:
    dep = [f"dterm{i:02d}" for i in range(spec.n_signal_words)]
    non = [f"nterm{i:02d}" for i in range(spec.n_signal_words)]
    return dep, non


def _build_table(spec, rng) -> Tuple[EmbeddingTable, List[str], List[str]]:
    dep_words, non_words = _signal_words(spec)
    fillers = [f"filler{i:02d}" for i in range(spec.n_filler_words)]

    axis_class = np.zeros(spec.dim)
    axis_class[0] = 1.0
    axis_gender = np.zeros(spec.dim)
    axis_gender[1] = 1.0
    leaned_base = spec.gender_scale * axis_gender + spec.strength * spec.lean_scale * axis_class
    # Pronoun vectors are pure gender markers whose magnitude scales with
    # strength: at 0 they are jitter-level, so pooled features carry no
    # usable gender trace. The definitional-pair words always span the
    # gender axis (audit geometry stays well defined at every strength)
    # and carry the class-axis lean that Direct Bias measures.
    pronoun_base = spec.strength * spec.gender_scale * axis_gender

    def fuzz(base):
        return base + rng.normal(0.0, spec.jitter, size=spec.dim)

    vectors: Dict[str, np.ndarray] = {}
    for w in dep_words:
        vectors[w] = fuzz(spec.class_scale * axis_class)
    for w in non_words:
        vectors[w] = fuzz(-spec.class_scale * axis_class)
    for w in fillers:
        vectors[w] = rng.normal(0.0, spec.filler_scale, size=spec.dim)
    if spec.include_gendered:
        # Pronoun forms share one magnitude so every note carries the same
        # gender-axis mass; the remaining pair words get per-word magnitude
        # variation, which keeps the pair differences spread along the
        # gender axis the way real embeddings behave (a dominant first
        # principal component).
        for w in FEMALE_FORMS:
            vectors[w] = fuzz(pronoun_base)
        for w in MALE_FORMS:
            vectors[w] = fuzz(-pronoun_base)
        for f, m in PAIR_WORDS:
            if f not in vectors:
                vectors[f] = fuzz(rng.uniform(0.6, 1.4) * leaned_base)
            if m not in vectors:
                vectors[m] = fuzz(-rng.uniform(0.6, 1.4) * leaned_base)
        for w in NEUTRAL_FORMS:
            vectors[w] = rng.normal(0.0, spec.jitter, size=spec.dim)
    for vec in vectors.values():
        vec.setflags(write=False)
    table = EmbeddingTable(
        name=f"synthetic-s{spec.strength:g}", dim=spec.dim,
        case_policy="fold-lower", vectors=vectors,
    )
    return table, dep_words, non_words


def _note_text(rng, gender, label, spec, dep_words, non_words, fillers) -> str:
    """Three sentences with a fixed token budget.

    Every note holds exactly five pronoun tokens (three subjects, one
    possessive, one clause-final object) and fifteen body tokens, so the
    gender-axis mass of the pooled feature is constant across notes and
    only the class signal varies. Pronoun placement is grammatical enough
    for the swap rules: the possessive precedes a body word, the object
    form precedes the final period.
    """
    subj, poss, obj = (
        ("She", "her", "her") if gender == "F" else ("He", "his", "him")
    )
    own, other = (dep_words, non_words) if label == "depression" else (non_words, dep_words)
    purity = spec.purity(label, gender)

    def body_token():
        if rng.random() < 0.5:
            pool = own if rng.random() < purity else other
            return pool[rng.integers(len(pool))]
        return fillers[rng.integers(len(fillers))]

    sentences = []
    for s in range(3):
        words = [subj] + [body_token() for _ in range(5)]
        if s == 0:
            # "She examined her <body word> ..." keeps the possessive read.
            words.insert(2, poss)
        if s == 2:
            words.append(obj)
        sentences.append(" ".join(words) + " .")
    return " ".join(sentences)


def build_fixture(spec: SynthSpec) -> SynthFixture:
    """Generate the corpus, embedding table, pairs, and target list."""
    rng = np.random.default_rng(spec.seed)
    table, dep_words, non_words = _build_table(spec, rng)
    fillers = [f"filler{i:02d}" for i in range(spec.n_filler_words)]

    notes = []
    counter = 0
    for label in ("depression", "none"):
        for gender in ("F", "M"):
            for _ in range(spec.n_per_cell):
                text = _note_text(rng, gender, label, spec, dep_words, non_words, fillers)
                notes.append(LabeledNote(
                    id=f"note{counter:05d}", text=text, label=label, gender=gender,
                ))
                counter += 1
    pairs = [GenderPair(f, m) for f, m in PAIR_WORDS]
    return SynthFixture(notes=notes, table=table, pairs=pairs, targets=list(dep_words))
