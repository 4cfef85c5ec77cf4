"""Extractor round-trip acceptance: output feeds the embfair toolkit
through its TSV vector-file interface with zero warnings."""

import logging

from embfair.embeddings import load_vectors
from embfair.geometry import GenderPair, gender_direction
from vecextract.extract import TemplateSpec, extract_to_tsv, load_checkpoint

from conftest import TARGET_WORDS

PAIRS = [("she", "he"), ("her", "his"), ("herself", "himself"),
         ("woman", "man"), ("mother", "father"), ("daughter", "son")]


def check(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"[acceptance] {name}: {status}{suffix}")
    assert ok, f"{name}: {detail}"


def test_extractor_round_trip(checkpoint_dir, tmp_path, caplog):
    checkpoint = load_checkpoint(checkpoint_dir)

    target_spec = TemplateSpec(kind="target",
                               template="{X} is a synonym of depression.",
                               fillers=tuple(TARGET_WORDS))
    target_tsv = tmp_path / "targets.tsv"
    n_rows = extract_to_tsv(checkpoint, target_spec, target_tsv)

    gender_spec = TemplateSpec(kind="gender", template="{X} is a person.",
                               fillers=tuple(PAIRS))
    gender_tsv = tmp_path / "gendered.tsv"
    extract_to_tsv(checkpoint, gender_spec, gender_tsv)

    with caplog.at_level(logging.WARNING, logger="embfair.embeddings"):
        targets = load_vectors(target_tsv, format="tsv", case_policy="preserve")
        gendered = load_vectors(gender_tsv, format="tsv", case_policy="preserve")
    warnings = [r for r in caplog.records if r.levelno >= logging.WARNING]

    direction = gender_direction(gendered, [GenderPair(f, m) for f, m in PAIRS])

    ok = (n_rows == 20 and len(targets) == 20
          and targets.dim == gendered.dim == checkpoint.hidden_size
          and not warnings
          and len(direction.pairs_used) == len(PAIRS)
          and abs(float(direction.spectrum.sum()) - 1.0) < 1e-6)
    check("Extractor round-trip", ok,
          f"rows {n_rows}, dim {targets.dim}, warnings {len(warnings)}, "
          f"pairs used {len(direction.pairs_used)}")
