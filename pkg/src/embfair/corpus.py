"""Clinical-note corpora and the gendered-text transforms.

A corpus is a list of :class:`LabeledNote` records loaded from JSON lines.
The transforms produce the four experimental training corpora: the
original notes, a pronoun-swapped copy, a pronoun-neutralized copy, and
the union of original and swapped (counterfactual augmentation).

Pronoun swapping is deterministic and token-based. The one genuinely
ambiguous token is "her" (object "him" vs possessive "his"); it is
resolved with a lookahead heuristic over a fixed function-word lexicon
rather than a tagger. The heuristic is approximate by design and the
lexicon is user-overridable through the swap-rules JSON file.
"""

import json
import logging
import string
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

log = logging.getLogger(__name__)

LABELS = ("depression", "none")
GENDERS = ("F", "M")
PROVENANCES = ("original", "swapped", "neutralized")
CONDITIONS = ("original", "swapped", "neutralized", "augmented")
NEUTRALIZE_MODES = ("replace", "remove")

SWAP_ID_SUFFIX = "#swap"


class CorpusFormatError(ValueError):
    """Raised for malformed corpus JSONL records."""


@dataclass(frozen=True)
class LabeledNote:
    id: str
    text: str
    label: str    # depression | none
    gender: str   # F | M
    provenance: str = "original"

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"bad label {self.label!r}")
        if self.gender not in GENDERS:
            raise ValueError(f"bad gender {self.gender!r}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"bad provenance {self.provenance!r}")


# ---------------------------------------------------------------------------
# Tokenization with offsets
# ---------------------------------------------------------------------------

class Token(NamedTuple):
    text: str
    start: int
    end: int


_PUNCT = frozenset(string.punctuation)
_CLITICS = frozenset({"s", "d", "ll", "re", "ve", "m", "t", "em"})


def tokenize(text) -> List[Token]:
    """Split on whitespace; peel leading/trailing punctuation into their own
    tokens; split clitics ("she's" -> she + 's). Offsets index into the
    original string so the text can be reconstructed losslessly."""
    tokens: List[Token] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        _split_chunk(text, i, j, tokens)
        i = j
    return tokens


def _split_chunk(text, start, end, out):
    lo, hi = start, end
    lead = []
    while lo < hi and text[lo] in _PUNCT:
        lead.append(Token(text[lo], lo, lo + 1))
        lo += 1
    trail = []
    while hi > lo and text[hi - 1] in _PUNCT:
        trail.append(Token(text[hi - 1], hi - 1, hi))
        hi -= 1
    out.extend(lead)
    if lo < hi:
        core = text[lo:hi]
        apos = core.rfind("'")
        if 0 < apos and core[apos + 1 :].lower() in _CLITICS:
            out.append(Token(core[:apos], lo, lo + apos))
            out.append(Token(core[apos:], lo + apos, hi))
        else:
            out.append(Token(core, lo, hi))
    out.extend(reversed(trail))


def detokenize(text, tokens) -> str:
    """Reconstruct the input from token texts plus the whitespace gaps that
    the offsets delimit; equals the input byte-for-byte."""
    out = []
    cursor = 0
    for tok in tokens:
        out.append(text[cursor:tok.start])
        out.append(tok.text)
        cursor = tok.end
    out.append(text[cursor:])
    return "".join(out)


def _apply_edits(text, tokens, edits: Dict[int, Optional[str]]) -> str:
    """Rebuild ``text`` with per-token replacements.

    ``edits[i]`` replaces token i; None deletes it. A deleted token also
    swallows the whitespace gap that follows it (or, when that gap is
    empty, the gap before it) so removals do not leave doubled spaces.
    """
    spans: List[Tuple[int, int, str]] = []
    for i, tok in enumerate(tokens):
        if i not in edits:
            continue
        rep = edits[i]
        if rep is not None:
            spans.append((tok.start, tok.end, rep))
            continue
        next_start = tokens[i + 1].start if i + 1 < len(tokens) else len(text)
        if next_start > tok.end:
            spans.append((tok.start, next_start, ""))
        else:
            prev_end = tokens[i - 1].end if i > 0 else 0
            spans.append((prev_end, tok.end, ""))
    out = []
    cursor = 0
    for lo, hi, rep in sorted(spans):
        out.append(text[cursor:lo])
        out.append(rep)
        cursor = hi
    out.append(text[cursor:])
    return "".join(out)


def _match_case(template, word):
    if template.isupper() and len(template) > 1:
        return word.upper()
    if template[:1].isupper():
        return word.capitalize()
    return word


# ---------------------------------------------------------------------------
# Swap rules
# ---------------------------------------------------------------------------

# Unambiguous pronoun map; "her" is handled by the lookahead heuristic.
_DEFAULT_PAIR_MAP = {
    "he": "she",
    "she": "he",
    "him": "her",
    "his": "her",
    "himself": "herself",
    "herself": "himself",
}

# Tokens after which "her" is read as the object form. Punctuation and
# end-of-text always trigger the object reading.
_DEFAULT_AMBIGUITY_LEXICON = {
    "conjunctions": ["and", "or", "but", "nor", "so", "yet", "because", "while",
                     "although", "though", "if", "when", "after", "before",
                     "since", "until", "unless", "that"],
    "prepositions": ["to", "for", "with", "at", "by", "from", "on", "in", "of",
                     "about", "into", "over", "under", "without", "through",
                     "toward", "towards", "up", "down", "off", "out", "during",
                     "against", "between", "near"],
    "adverbs": ["yesterday", "today", "tomorrow", "again", "too", "now", "then",
                "there", "here", "home", "away", "back", "alone", "earlier",
                "later", "once", "twice", "first", "last", "well", "anymore"],
    "pronouns_and_determiners": ["he", "she", "they", "it", "i", "we", "you",
                                 "this", "that", "these", "those", "the", "a", "an"],
    "auxiliaries": ["was", "is", "are", "were", "has", "had", "have", "will",
                    "would", "could", "should", "can", "may", "might", "did",
                    "does", "do", "not"],
}

# Optional extension map (gendered titles and kinship nouns), off by default.
EXTENSION_PAIR_MAP = {
    "mr": "mrs", "mrs": "mr", "sir": "madam", "madam": "sir",
    "wife": "husband", "husband": "wife", "mother": "father", "father": "mother",
    "mom": "dad", "dad": "mom", "woman": "man", "man": "woman",
    "girl": "boy", "boy": "girl", "daughter": "son", "son": "daughter",
    "sister": "brother", "brother": "sister", "hers": "his",
}

_NEUTRAL_MAP = {
    "he": "they",
    "she": "they",
    "him": "them",
    "his": "their",
    "himself": "themself",
    "herself": "themself",
}
_NEUTRAL_HER = {"object": "them", "possessive": "their"}


@dataclass(frozen=True)
class SwapRules:
    """Token-level gender swap table plus the "her" disambiguation lexicon."""

    pair_map: Dict[str, str]
    her_object: str = "him"
    her_possessive: str = "his"
    object_cues: FrozenSet[str] = frozenset()

    @staticmethod
    def default(extensions=False) -> "SwapRules":
        pair_map = dict(_DEFAULT_PAIR_MAP)
        if extensions:
            pair_map.update(EXTENSION_PAIR_MAP)
        cues = frozenset(
            w for words in _DEFAULT_AMBIGUITY_LEXICON.values() for w in words
        )
        return SwapRules(pair_map=pair_map, object_cues=cues)

    @staticmethod
    def from_json(path) -> "SwapRules":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        pair_map = {k.lower(): v.lower() for k, v in data["pair_map"].items()}
        amb = data.get("ambiguous", {}).get("her", {})
        lex = data.get("ambiguity_lexicon", _DEFAULT_AMBIGUITY_LEXICON)
        if isinstance(lex, dict):
            cues = frozenset(w.lower() for words in lex.values() for w in words)
        else:
            cues = frozenset(w.lower() for w in lex)
        return SwapRules(
            pair_map=pair_map,
            her_object=amb.get("object", "him"),
            her_possessive=amb.get("possessive", "his"),
            object_cues=cues,
        )

    def gendered_tokens(self) -> FrozenSet[str]:
        return frozenset(self.pair_map) | {"her"}

    def her_is_object(self, next_token: Optional[str]) -> bool:
        """Lookahead heuristic: object reading before punctuation,
        end-of-text, or a cue word; possessive otherwise."""
        if next_token is None:
            return True
        if all(c in _PUNCT for c in next_token):
            return True
        return next_token.lower() in self.object_cues


def load_swap_rules(path=None, extensions=False) -> SwapRules:
    if path is None:
        return SwapRules.default(extensions=extensions)
    return SwapRules.from_json(path)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def _map_gendered(text, rules, mapping, her_forms) -> Tuple[str, int]:
    """Replace gendered tokens in ``text``. Returns (new_text, n_replaced).

    ``mapping`` is the unambiguous token map; ``her_forms`` is the
    (object, possessive) pair chosen by the lookahead heuristic. Pass
    ``None`` values to delete tokens instead of replacing them.
    """
    tokens = tokenize(text)
    edits: Dict[int, Optional[str]] = {}
    for i, tok in enumerate(tokens):
        low = tok.text.lower()
        if low == "her":
            nxt = tokens[i + 1].text if i + 1 < len(tokens) else None
            rep = her_forms[0] if rules.her_is_object(nxt) else her_forms[1]
        elif low in mapping:
            rep = mapping[low]
        else:
            continue
        edits[i] = _match_case(tok.text, rep) if rep is not None else None
    return _apply_edits(text, tokens, edits), len(edits)


def swap_text(text, rules) -> Tuple[str, int]:
    """Swap gendered tokens in raw text; returns (swapped_text, n_swapped)."""
    return _map_gendered(text, rules, rules.pair_map, (rules.her_object, rules.her_possessive))


def swap_gender(note, rules=None) -> LabeledNote:
    """Counterfactual twin of a note: pronouns swapped, gender flipped,
    id suffixed with ``#swap``. The input must be an original note."""
    rules = rules or SwapRules.default()
    if note.provenance != "original":
        raise ValueError(f"can only swap original notes, got {note.provenance!r}")
    text, n_swapped = swap_text(note.text, rules)
    if n_swapped == 0:
        log.warning("note %s: no gendered tokens found to swap", note.id)
    return LabeledNote(
        id=note.id + SWAP_ID_SUFFIX,
        text=text,
        label=note.label,
        gender="F" if note.gender == "M" else "M",
        provenance="swapped",
    )


def neutralize(note, mode="replace", rules=None) -> LabeledNote:
    """Remove or replace gendered pronouns with gender-neutral ones.

    The gender field is retained for evaluation grouping; only the text
    changes. Verb agreement is deliberately not repaired.
    """
    rules = rules or SwapRules.default()
    if note.provenance != "original":
        raise ValueError(f"can only neutralize original notes, got {note.provenance!r}")
    if mode not in NEUTRALIZE_MODES:
        raise ValueError(f"bad neutralize mode {mode!r}")
    gendered = rules.gendered_tokens()
    if mode == "replace":
        mapping = {w: _NEUTRAL_MAP.get(w) for w in gendered if w != "her"}
        mapping = {w: r for w, r in mapping.items() if r is not None}
        her_forms = (_NEUTRAL_HER["object"], _NEUTRAL_HER["possessive"])
    else:
        mapping = {w: None for w in gendered if w != "her"}
        her_forms = (None, None)
    text, _ = _map_gendered(note.text, rules, mapping, her_forms)
    return replace(note, text=text, provenance="neutralized")


def build_condition(train, condition, rules=None, neutralize_mode="replace") -> List[LabeledNote]:
    """Materialize one experimental training corpus.

    original -> identity; swapped -> pronoun-swapped copy of every note;
    neutralized -> neutralized copy; augmented -> originals plus their
    swapped twins. Per-label counts are preserved (doubled for augmented).
    """
    rules = rules or SwapRules.default()
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    for note in train:
        if note.provenance != "original":
            raise ValueError(f"training corpus must be original notes; {note.id} is {note.provenance}")
    if condition == "original":
        return list(train)
    if condition == "swapped":
        return [swap_gender(n, rules) for n in train]
    if condition == "neutralized":
        return [neutralize(n, neutralize_mode, rules) for n in train]
    out = list(train) + [swap_gender(n, rules) for n in train]
    ids = [n.id for n in out]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate note ids after augmentation union")
    return out


def build_paired_testset(test, rules=None) -> List[Tuple[LabeledNote, LabeledNote]]:
    """Pair every test note with its pronoun-swapped twin."""
    rules = rules or SwapRules.default()
    return [(note, swap_gender(note, rules)) for note in test]


# ---------------------------------------------------------------------------
# JSONL corpus I/O
# ---------------------------------------------------------------------------

_REQUIRED_FIELDS = ("id", "text", "label", "gender")


def load_corpus(path, strict=True) -> List[LabeledNote]:
    """Read a JSONL corpus: one ``{"id","text","label","gender"}`` record
    per line (optional ``provenance`` defaults to original).

    With ``strict=False`` malformed lines are skipped with a warning that
    names the line number; otherwise they raise :class:`CorpusFormatError`.
    """
    notes: List[LabeledNote] = []
    seen = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record is not an object")
            missing = [f for f in _REQUIRED_FIELDS if f not in record]
            if missing:
                raise ValueError(f"missing fields {missing}")
            if not str(record["text"]):
                raise ValueError("empty text")
            note = LabeledNote(
                id=str(record["id"]),
                text=str(record["text"]),
                label=record["label"],
                gender=record["gender"],
                provenance=record.get("provenance", "original"),
            )
            if note.id in seen:
                raise ValueError(f"duplicate id {note.id!r}")
        except ValueError as exc:
            if strict:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from None
            log.warning("%s:%d: skipping malformed record: %s", path, lineno, exc)
            continue
        seen.add(note.id)
        notes.append(note)
    return notes


def save_corpus(notes: Sequence[LabeledNote], path):
    with Path(path).open("w", encoding="utf-8") as handle:
        for note in notes:
            handle.write(json.dumps({
                "id": note.id,
                "text": note.text,
                "label": note.label,
                "gender": note.gender,
                "provenance": note.provenance,
            }, ensure_ascii=False) + "\n")
