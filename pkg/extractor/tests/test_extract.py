import numpy as np
import pytest

from vecextract.cli import main
from vecextract.extract import (
    ExtractionError,
    TemplateSpec,
    extract_to_tsv,
    extract_vectors,
    load_checkpoint,
    read_pairs_file,
    read_words_file,
)

from conftest import TARGET_WORDS


@pytest.fixture(scope="module")
def checkpoint(checkpoint_dir):
    return load_checkpoint(checkpoint_dir)


class TestTemplateSpec:
    def test_target_template_rejects_pronouns(self):
        with pytest.raises(ValueError, match="gender pronouns"):
            TemplateSpec(kind="target", template="she says {X} is sad.",
                         fillers=("gloomy",))

    def test_slot_required(self):
        with pytest.raises(ValueError, match="slot"):
            TemplateSpec(kind="target", template="no slot here.", fillers=("a",))

    def test_gender_fillers_must_be_distinct_pairs(self):
        with pytest.raises(ValueError, match="pairs"):
            TemplateSpec(kind="gender", template="{X} is a person.",
                         fillers=("she",))
        with pytest.raises(ValueError, match="pairs"):
            TemplateSpec(kind="gender", template="{X} is a person.",
                         fillers=(("she", "she"),))

    def test_fill_reports_span(self):
        spec = TemplateSpec(kind="target", template="{X} is a synonym of depression.",
                            fillers=("sad",))
        text, lo, hi = spec.fill("sad")
        assert text == "sad is a synonym of depression."
        assert text[lo:hi] == "sad"

    def test_gender_minimal_pair_differs_only_at_slot(self):
        spec = TemplateSpec(kind="gender", template="{X} is a person.",
                            fillers=(("she", "he"),))
        female, _, _ = spec.fill("she")
        male, _, _ = spec.fill("he")
        f_tokens, m_tokens = female.split(), male.split()
        assert len(f_tokens) == len(m_tokens)
        diffs = [(a, b) for a, b in zip(f_tokens, m_tokens) if a != b]
        assert diffs == [("she", "he")]


class TestExtract:
    def test_single_word_shape_contract(self, checkpoint):
        spec = TemplateSpec(kind="gender", template="{X} is a person.",
                            fillers=(("she", "he"),))
        vectors = extract_vectors(checkpoint, spec)
        assert set(vectors) == {"she", "he"}
        assert vectors["she"].shape == (checkpoint.hidden_size,)
        assert np.all(np.isfinite(vectors["she"]))

    def test_multi_token_phrase_pools_the_full_span(self, checkpoint):
        spec = TemplateSpec(kind="target",
                            template="{X} is a synonym of depression.",
                            fillers=("falling asleep", "sad"))
        vectors = extract_vectors(checkpoint, spec)
        assert vectors["falling asleep"].shape == (checkpoint.hidden_size,)
        assert not np.allclose(vectors["falling asleep"], vectors["sad"])

    def test_deterministic_output_file(self, checkpoint, tmp_path):
        spec = TemplateSpec(kind="target",
                            template="{X} is a synonym of depression.",
                            fillers=tuple(TARGET_WORDS[:5]))
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        extract_to_tsv(checkpoint, spec, a)
        extract_to_tsv(checkpoint, spec, b)
        assert a.read_bytes() == b.read_bytes()

    def test_reordering_words_permutes_rows_only(self, checkpoint, tmp_path):
        words = TARGET_WORDS[:6]
        spec_fwd = TemplateSpec(kind="target", template="{X} is sad.",
                                fillers=tuple(words))
        spec_rev = TemplateSpec(kind="target", template="{X} is sad.",
                                fillers=tuple(reversed(words)))
        fwd = extract_vectors(checkpoint, spec_fwd)
        rev = extract_vectors(checkpoint, spec_rev)
        assert list(fwd) == words
        assert list(rev) == list(reversed(words))
        for w in words:
            assert np.array_equal(fwd[w], rev[w])

    def test_vanishing_word_is_an_error(self, checkpoint):
        spec = TemplateSpec(kind="target", template="{X} is sad.",
                            fillers=("\x00",))
        with pytest.raises(ExtractionError, match="not found"):
            extract_vectors(checkpoint, spec)

    def test_duplicate_words_rejected(self, checkpoint):
        spec = TemplateSpec(kind="target", template="{X} is sad.",
                            fillers=("t00", "t00"))
        with pytest.raises(ExtractionError, match="duplicate"):
            extract_vectors(checkpoint, spec)

    def test_layer_selection(self, checkpoint):
        spec = TemplateSpec(kind="target", template="{X} is sad.", fillers=("t01",))
        last = extract_vectors(checkpoint, spec, layer=-1)["t01"]
        embed = extract_vectors(checkpoint, spec, layer=0)["t01"]
        assert not np.allclose(last, embed)

    def test_layer_out_of_range(self, checkpoint):
        spec = TemplateSpec(kind="target", template="{X} is sad.", fillers=("t01",))
        with pytest.raises(ExtractionError, match="layer"):
            extract_vectors(checkpoint, spec, layer=7)


class TestListFiles:
    def test_words_file(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("# c\nsad\n\nfalling asleep\n", encoding="utf-8")
        assert read_words_file(path) == ["sad", "falling asleep"]

    def test_pairs_file(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("she\the\nher\thim\n", encoding="utf-8")
        assert read_pairs_file(path) == [("she", "he"), ("her", "him")]

    def test_pairs_file_bad_row(self, tmp_path):
        path = tmp_path / "p.tsv"
        path.write_text("she he\n", encoding="utf-8")
        with pytest.raises(ValueError):
            read_pairs_file(path)


class TestCli:
    def test_target_extraction_end_to_end(self, checkpoint_dir, tmp_path, capsys):
        words = tmp_path / "words.txt"
        words.write_text("\n".join(TARGET_WORDS[:4]) + "\n", encoding="utf-8")
        out = tmp_path / "vecs.tsv"
        code = main(["--checkpoint", str(checkpoint_dir),
                     "--template", "{X} is a synonym of depression.",
                     "--words", str(words), "--out", str(out)])
        assert code == 0
        assert out.exists()
        assert "wrote 4 vectors" in capsys.readouterr().out
        import json
        meta = json.loads((tmp_path / "vecs.tsv.meta.json").read_text())
        assert meta["layer"] == -1
        assert meta["pooling"] == "subword-mean"
        assert meta["rows"] == 4

    def test_gender_extraction_end_to_end(self, checkpoint_dir, tmp_path):
        pairs = tmp_path / "pairs.tsv"
        pairs.write_text("she\the\nher\this\n", encoding="utf-8")
        out = tmp_path / "gendered.tsv"
        code = main(["--checkpoint", str(checkpoint_dir), "--kind", "gender",
                     "--template", "{X} is a person.",
                     "--pairs", str(pairs), "--out", str(out)])
        assert code == 0
        assert len(out.read_text().strip().splitlines()) == 4

    def test_missing_words_file_is_io_error(self, checkpoint_dir, tmp_path):
        code = main(["--checkpoint", str(checkpoint_dir),
                     "--template", "{X} is sad.",
                     "--words", str(tmp_path / "absent.txt"),
                     "--out", str(tmp_path / "o.tsv")])
        assert code == 3

    def test_bad_template_is_input_error(self, checkpoint_dir, tmp_path):
        words = tmp_path / "w.txt"
        words.write_text("sad\n", encoding="utf-8")
        code = main(["--checkpoint", str(checkpoint_dir),
                     "--template", "no slot", "--words", str(words),
                     "--out", str(tmp_path / "o.tsv")])
        assert code == 4
