import numpy as np
import pytest

from embfair.corpus import LabeledNote
from embfair.embeddings import EmbeddingTable


def make_table(vectors, case_policy="fold-lower", name="test", dim=None):
    """EmbeddingTable from a plain {word: list} dict."""
    arrays = {}
    for word, vec in vectors.items():
        arr = np.asarray(vec, dtype=float)
        arr.setflags(write=False)
        key = word.lower() if case_policy == "fold-lower" else word
        arrays[key] = arr
    if dim is None:
        dim = len(next(iter(arrays.values())))
    return EmbeddingTable(name=name, dim=dim, case_policy=case_policy, vectors=arrays)


def make_note(text, label="depression", gender="F", note_id="n0", provenance="original"):
    return LabeledNote(id=note_id, text=text, label=label, gender=gender,
                       provenance=provenance)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def unambiguous_sentence(rng):
    """Grammar-shaped sentences over he/she/him/his/himself/herself.

    "him" appears only before punctuation, end of text, or an object cue
    (preposition/conjunction); "his" only before a plain noun. On this
    subset the swap transform is an involution.
    """
    nouns = ["mood", "leg", "pain", "sleep", "doctor", "nurse", "family"]
    verbs = ["improved", "hurt", "reported", "examined", "helped", "returned"]
    subj = ["He", "She"]
    choice = rng.integers(0, 6)
    n = lambda: nouns[rng.integers(len(nouns))]
    v = lambda: verbs[rng.integers(len(verbs))]
    s = lambda: subj[rng.integers(2)]
    if choice == 0:
        return f"{s()} {v()} his {n()}."
    if choice == 1:
        return f"The nurse {v()} him."
    if choice == 2:
        return f"{s()} {v()} himself and herself."
    if choice == 3:
        return f"{s()} told him about his {n()}."
    if choice == 4:
        return f"His {n()} {v()} him"
    return f"{s()} {v()} and she {v()} his {n()}."
