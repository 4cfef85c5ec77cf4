import numpy as np
import pytest

from embfair.corpus import SwapRules, tokenize
from embfair.embeddings import load_vectors, write_tsv
from embfair.geometry import direct_bias, gender_direction
from embfair.synth import SynthSpec, build_fixture


def test_counts_match_request():
    fx = build_fixture(SynthSpec(n_per_cell=7, seed=0))
    assert len(fx.notes) == 28
    for label in ("depression", "none"):
        for gender in ("F", "M"):
            cell = [n for n in fx.notes if n.label == label and n.gender == gender]
            assert len(cell) == 7
    assert len({n.id for n in fx.notes}) == 28


def test_deterministic_given_seed():
    a = build_fixture(SynthSpec(n_per_cell=5, seed=3))
    b = build_fixture(SynthSpec(n_per_cell=5, seed=3))
    assert [n.text for n in a.notes] == [n.text for n in b.notes]
    assert sorted(a.table.words()) == sorted(b.table.words())
    for w in a.table.words():
        assert np.array_equal(a.table.get(w), b.table.get(w))


def test_fixed_pronoun_budget():
    fx = build_fixture(SynthSpec(n_per_cell=5, seed=1))
    gendered = SwapRules.default().gendered_tokens()
    for note in fx.notes:
        tokens = [t.text.lower() for t in tokenize(note.text)]
        assert sum(t in gendered for t in tokens) == 5
        assert sum(t in fx.table for t in tokens) == 20


def test_db_tracks_strength():
    strong = build_fixture(SynthSpec(n_per_cell=5, strength=1.0, seed=2))
    weak = build_fixture(SynthSpec(n_per_cell=5, strength=0.0, seed=2))
    db_strong = direct_bias(strong.table,
                            gender_direction(strong.table, strong.pairs),
                            strong.targets)
    db_weak = direct_bias(weak.table,
                          gender_direction(weak.table, weak.pairs),
                          weak.targets)
    assert db_strong.direction == "F"
    assert db_strong.db > 0.3
    assert db_weak.db < 0.1


def test_table_round_trips_through_tsv(tmp_path):
    fx = build_fixture(SynthSpec(n_per_cell=3, seed=4))
    path = tmp_path / "emb.tsv"
    write_tsv(fx.table, path)
    table = load_vectors(path, format="tsv")
    assert table.dim == fx.table.dim
    assert len(table) == len(fx.table)


def test_gendered_words_can_be_omitted():
    fx = build_fixture(SynthSpec(n_per_cell=3, seed=5, include_gendered=False))
    assert "she" not in fx.table
    assert "he" not in fx.table
    assert "they" not in fx.table
    # signal + filler words remain
    assert "dterm00" in fx.table and "filler00" in fx.table


def test_purity_shift_only_on_depression_notes():
    spec = SynthSpec(strength=1.0, signal_purity=0.72, hardness_delta=0.15)
    assert spec.purity("depression", "F") == pytest.approx(0.57)
    assert spec.purity("depression", "M") == pytest.approx(0.87)
    assert spec.purity("none", "F") == spec.purity("none", "M") == 0.72
    neutral = SynthSpec(strength=0.0)
    assert neutral.purity("depression", "F") == neutral.purity("depression", "M")


def test_spec_validation():
    with pytest.raises(ValueError):
        SynthSpec(dim=2)
    with pytest.raises(ValueError):
        SynthSpec(strength=1.5)
    with pytest.raises(ValueError):
        SynthSpec(n_per_cell=0)
    with pytest.raises(ValueError):
        SynthSpec(signal_purity=0.4)


def test_targets_are_in_vocabulary():
    fx = build_fixture(SynthSpec(n_per_cell=3, seed=6))
    assert all(t in fx.table for t in fx.targets)
    for pair in fx.pairs:
        assert pair.female_word in fx.table
        assert pair.male_word in fx.table
