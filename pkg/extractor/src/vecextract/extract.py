"""Template filling, span location, subword pooling, and the TSV writer."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

log = logging.getLogger(__name__)

SLOT = "{X}"

GENDER_PRONOUNS = frozenset({
    "he", "she", "him", "her", "his", "hers", "himself", "herself",
})


class ExtractionError(RuntimeError):
    pass


@dataclass(frozen=True)
class TemplateSpec:
    """A sentence template with one slot plus the words that fill it.

    ``kind="target"`` templates must not contain gender pronouns, so the
    context adds no gender signal of its own. ``kind="gender"`` templates
    take (female, male) filler pairs; the two filled sentences then form a
    minimal pair differing only at the gendered slot.
    """

    kind: str  # gender | target
    template: str
    fillers: Tuple = ()

    def __post_init__(self):
        if self.kind not in ("gender", "target"):
            raise ValueError(f"unknown template kind {self.kind!r}")
        if SLOT not in self.template:
            raise ValueError(f"template must contain the {SLOT} slot")
        if self.kind == "target":
            tokens = {t.strip(".,;:!?").lower() for t in self.template.split()}
            gendered = tokens & GENDER_PRONOUNS
            if gendered:
                raise ValueError(f"target template contains gender pronouns {sorted(gendered)}")
            for f in self.fillers:
                if not isinstance(f, str) or not f.strip():
                    raise ValueError("target fillers must be non-empty strings")
        else:
            for pair in self.fillers:
                if (not isinstance(pair, (tuple, list)) or len(pair) != 2
                        or pair[0] == pair[1] or not all(isinstance(w, str) and w for w in pair)):
                    raise ValueError("gender fillers must be (female, male) pairs of distinct words")

    def words(self) -> List[str]:
        if self.kind == "target":
            return list(self.fillers)
        return [w for pair in self.fillers for w in pair]

    def fill(self, word) -> Tuple[str, int, int]:
        """Sentence with the slot filled; returns (text, start, end) of the
        word's character span."""
        start = self.template.index(SLOT)
        text = self.template.replace(SLOT, word, 1)
        return text, start, start + len(word)


@dataclass
class Checkpoint:
    name: str
    tokenizer: object
    model: object
    hidden_size: int
    n_layers: int


def load_checkpoint(name_or_path) -> Checkpoint:
    """Load tokenizer + encoder in deterministic inference mode."""
    tokenizer = AutoTokenizer.from_pretrained(name_or_path, use_fast=True)
    model = AutoModel.from_pretrained(name_or_path)
    model.eval()
    embeddings = model.get_input_embeddings()
    if embeddings.num_embeddings < len(tokenizer):
        raise ExtractionError(
            f"checkpoint mismatch: tokenizer has {len(tokenizer)} tokens but the "
            f"model embeds only {embeddings.num_embeddings}"
        )
    return Checkpoint(
        name=str(name_or_path),
        tokenizer=tokenizer,
        model=model,
        hidden_size=model.config.hidden_size,
        n_layers=model.config.num_hidden_layers,
    )


def _encode_batch(checkpoint, sentences, layer):
    enc = checkpoint.tokenizer(
        list(sentences), return_tensors="pt", padding=True,
        return_offsets_mapping=True, return_special_tokens_mask=True,
    )
    offsets = enc.pop("offset_mapping")
    special = enc.pop("special_tokens_mask")
    with torch.no_grad():
        out = checkpoint.model(**enc, output_hidden_states=True)
    states = out.hidden_states[layer]
    return states.numpy(), offsets.numpy(), special.numpy(), enc["attention_mask"].numpy()


def _pool_span(states, offsets, special, attention, span) -> np.ndarray:
    lo, hi = span
    keep = []
    for i in range(states.shape[0]):
        if not attention[i] or special[i]:
            continue
        t_lo, t_hi = offsets[i]
        if t_hi > lo and t_lo < hi:  # character overlap
            keep.append(i)
    if not keep:
        raise ExtractionError(f"word span {span} not found in the tokenized template")
    return states[keep].mean(axis=0)


def extract_vectors(checkpoint, spec: TemplateSpec, layer=-1) -> Dict[str, np.ndarray]:
    """Vector per filler word, pooled over its subword span at ``layer``.

    ``layer`` indexes the model's hidden-state stack (0 is the embedding
    layer, -1 the final hidden layer). Inference is run twice and compared
    element-wise; any discrepancy aborts the extraction.
    """
    words = spec.words()
    if len(set(words)) != len(words):
        raise ExtractionError("duplicate words in the filler list")
    if not words:
        raise ExtractionError("no words to extract")
    n_states = checkpoint.n_layers + 1
    if not -n_states <= layer < n_states:
        raise ExtractionError(f"layer {layer} out of range for {checkpoint.n_layers} layers")

    sentences, spans = [], []
    for word in words:
        text, lo, hi = spec.fill(word)
        sentences.append(text)
        spans.append((lo, hi))

    states, offsets, special, attention = _encode_batch(checkpoint, sentences, layer)
    states_again, *_ = _encode_batch(checkpoint, sentences, layer)
    if not np.array_equal(states, states_again):
        raise ExtractionError(
            "nondeterministic inference detected by the double-run self-check"
        )

    vectors = {}
    for i, word in enumerate(words):
        vec = _pool_span(states[i], offsets[i], special[i], attention[i], spans[i])
        if not np.all(np.isfinite(vec)):
            raise ExtractionError(f"non-finite vector extracted for {word!r}")
        vectors[word] = vec.astype(np.float64)
    return vectors


def extract_to_tsv(checkpoint, spec: TemplateSpec, out_path, layer=-1) -> int:
    """Write one TSV row per filler word; returns the row count."""
    vectors = extract_vectors(checkpoint, spec, layer)
    out_path = Path(out_path)
    with out_path.open("w", encoding="utf-8") as handle:
        for word, vec in vectors.items():
            handle.write(word + "\t" + "\t".join(repr(float(x)) for x in vec) + "\n")
    log.info("wrote %d vectors (dim %d) to %s", len(vectors),
             checkpoint.hidden_size, out_path)
    return len(vectors)


def read_words_file(path) -> List[str]:
    """One word or phrase per line; # comments and blanks skipped."""
    words = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()
             if line.strip() and not line.startswith("#")]
    if not words:
        raise ValueError(f"{path}: no words found")
    return words


def read_pairs_file(path) -> List[Tuple[str, str]]:
    """Two-column TSV of female<TAB>male rows."""
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"{path}:{lineno}: expected two tab-separated words")
        pairs.append((cols[0].strip(), cols[1].strip()))
    if not pairs:
        raise ValueError(f"{path}: no pairs found")
    return pairs
