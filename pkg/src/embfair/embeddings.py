"""Word-vector tables: loading, validation, lookup, and phrase resolution.

Vector files are text only. Two formats are supported:

* ``w2v-text`` -- first line is ``"<vocab_count> <dim>"``, every following
  line is ``"word v1 v2 ... vdim"`` separated by single spaces.
* ``tsv`` -- no header, tab-separated ``"word\\tv1\\t...\\tvdim"``, UTF-8.

Vectors are stored exactly as read; nothing is normalized at load time so
that averaging token vectors keeps its plain arithmetic meaning.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, Optional

import numpy as np

log = logging.getLogger(__name__)

CASE_POLICIES = ("preserve", "fold-lower")
FORMATS = ("w2v-text", "tsv")


class VectorFileError(ValueError):
    """Raised when a vector file violates its format contract."""


def _fold(word, case_policy):
    return word.lower() if case_policy == "fold-lower" else word


@dataclass(frozen=True)
class EmbeddingTable:
    """Immutable word -> vector map with a fixed dimensionality.

    Lookups honor the table's case policy; with ``fold-lower`` both the
    stored keys and the queries are lower-cased, so lookup is a pure
    function of the query string.
    """

    name: str
    dim: int
    case_policy: str = "fold-lower"
    vectors: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.case_policy not in CASE_POLICIES:
            raise ValueError(f"unknown case policy {self.case_policy!r}")
        if self.dim <= 0:
            raise ValueError("dim must be positive")

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, word):
        return _fold(word, self.case_policy) in self.vectors

    def words(self) -> Iterator[str]:
        return iter(self.vectors)

    def get(self, word) -> Optional[np.ndarray]:
        """Vector for ``word`` under this table's case policy, or None."""
        return self.vectors.get(_fold(word, self.case_policy))


@dataclass(frozen=True)
class PhraseResolution:
    """Outcome of looking up a (possibly multi-word) term.

    ``strategy_used`` is ``"missing"`` if and only if ``vector`` is None.
    """

    query: str
    strategy_used: str  # exact | underscore-joined | token-mean | missing
    vector: Optional[np.ndarray]

    def __post_init__(self):
        if (self.strategy_used == "missing") != (self.vector is None):
            raise ValueError("missing strategy must coincide with absent vector")


def _validate_vector(values, word, lineno, path):
    vec = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(vec)):
        raise VectorFileError(
            f"{path}:{lineno}: non-finite value in vector for {word!r}"
        )
    if not np.any(vec):
        raise VectorFileError(f"{path}:{lineno}: all-zero vector for {word!r}")
    vec.setflags(write=False)
    return vec


def _parse_floats(fields, word, lineno, path):
    try:
        return [float(x) for x in fields]
    except ValueError as exc:
        raise VectorFileError(
            f"{path}:{lineno}: unparseable value in row for {word!r}: {exc}"
        ) from None


def load_vectors(path, format="tsv", case_policy="fold-lower", name=None):
    """Parse a vector file into an :class:`EmbeddingTable`.

    Duplicate words (after case folding) keep the first occurrence and log
    a warning. Rows whose dimension disagrees with the first row, rows with
    non-finite or all-zero vectors, and malformed headers raise
    :class:`VectorFileError` naming the offending line.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown vector format {format!r}")
    if case_policy not in CASE_POLICIES:
        raise ValueError(f"unknown case policy {case_policy!r}")
    path = Path(path)
    raw = path.read_text(encoding="utf-8")
    lines = raw.splitlines()

    expected_count = None
    dim = None
    start = 0
    if format == "w2v-text":
        if not lines:
            raise VectorFileError(f"{path}: empty file")
        header = lines[0].split()
        if len(header) != 2:
            raise VectorFileError(f"{path}:1: malformed header {lines[0]!r}")
        try:
            expected_count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise VectorFileError(f"{path}:1: malformed header {lines[0]!r}") from None
        if expected_count <= 0 or dim <= 0:
            raise VectorFileError(f"{path}:1: malformed header {lines[0]!r}")
        start = 1

    vectors: Dict[str, np.ndarray] = {}
    n_rows = 0
    for offset, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        if format == "tsv":
            fields = line.split("\t")
        else:
            fields = line.split(" ")
        if len(fields) < 2:
            raise VectorFileError(f"{path}:{offset}: too few fields")
        word, values = fields[0], fields[1:]
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise VectorFileError(
                f"{path}:{offset}: expected {dim} values for {word!r}, got {len(values)}"
            )
        n_rows += 1
        vec = _validate_vector(_parse_floats(values, word, offset, path), word, offset, path)
        key = _fold(word, case_policy)
        if key in vectors:
            log.warning("%s:%d: duplicate word %r, keeping first occurrence", path, offset, word)
            continue
        vectors[key] = vec

    if expected_count is not None and n_rows != expected_count:
        raise VectorFileError(
            f"{path}: header announces {expected_count} rows but file has {n_rows}"
        )
    if not vectors:
        raise VectorFileError(f"{path}: no vector rows found")
    return EmbeddingTable(
        name=name or path.stem, dim=dim, case_policy=case_policy, vectors=vectors
    )


def write_tsv(table, path):
    """Write a table in the TSV interchange format.

    Uses ``repr`` for floats, which round-trips float64 exactly, so a
    write/load cycle reproduces every vector element-wise.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for word, vec in table.vectors.items():
            handle.write(word + "\t" + "\t".join(repr(float(x)) for x in vec) + "\n")


def resolve(table, query) -> PhraseResolution:
    """Resolve a term to a single vector.

    The fallback chain is: exact match, whitespace joined with underscores,
    then the arithmetic mean of the in-vocabulary tokens. A query none of
    whose tokens are known resolves to ``missing`` (a value, not an error).
    """
    q = query.strip()
    if not q:
        raise ValueError("query is empty after trimming")

    vec = table.get(q)
    if vec is not None:
        return PhraseResolution(query, "exact", vec)

    tokens = q.split()
    if len(tokens) > 1:
        vec = table.get("_".join(tokens))
        if vec is not None:
            return PhraseResolution(query, "underscore-joined", vec)

    found = [table.get(t) for t in tokens]
    found = [v for v in found if v is not None]
    if found:
        mean = np.mean(found, axis=0)
        mean.setflags(write=False)
        return PhraseResolution(query, "token-mean", mean)
    return PhraseResolution(query, "missing", None)
