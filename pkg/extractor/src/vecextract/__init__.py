"""Word-level vector extraction from contextual transformer checkpoints.

Words are embedded inside fixed sentence templates, run through the
checkpoint in deterministic inference mode, and the hidden states of the
word's token span are mean-pooled into a single vector per word. Output
is the tab-separated ``word<TAB>v1...vdim`` vector-file format.
"""

__version__ = "0.1.0"

from .extract import (
    GENDER_PRONOUNS,
    ExtractionError,
    TemplateSpec,
    extract_to_tsv,
    extract_vectors,
    load_checkpoint,
)

__all__ = [
    "TemplateSpec", "ExtractionError", "GENDER_PRONOUNS",
    "load_checkpoint", "extract_vectors", "extract_to_tsv",
]
