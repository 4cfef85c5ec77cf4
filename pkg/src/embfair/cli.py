"""Command-line entry point.

Subcommands: ``audit`` (embedding bias score + spectrum), ``transform``
(corpus transforms), ``experiment`` (the condition x learner matrix),
``synth`` (synthetic fixtures), ``report`` (re-render a report JSON).

Every command takes ``--config FILE`` (JSON) plus flag overrides; flags
win. The fully resolved configuration is echoed to ``config.json`` in the
output directory so runs are reproducible from their outputs alone.

Exit codes: 0 success, 2 usage, 3 I/O failure, 4 parse failure,
5 math/degenerate-data failure, 1 anything else.
"""

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional, Tuple

from . import __version__
from .corpus import (
    CONDITIONS,
    NEUTRALIZE_MODES,
    CorpusFormatError,
    build_condition,
    load_corpus,
    load_swap_rules,
    save_corpus,
    swap_text,
)
from .embeddings import VectorFileError, load_vectors, write_tsv
from .fairness import render_markdown, report_matrix
from .geometry import (
    GeometryError,
    default_gender_pairs,
    default_target_terms,
    direct_bias,
    gender_direction,
    load_gender_pairs,
    load_terms,
    write_spectrum_csv,
)
from .learners import LEARNER_KINDS, HyperparamGrid
from .synth import SynthSpec, SynthFixture, build_fixture

log = logging.getLogger("embfair")

EXIT_OK, EXIT_ERROR, EXIT_IO, EXIT_PARSE, EXIT_MATH = 0, 1, 3, 4, 5
OUTPUT_DIR_ENV = "EMBFAIR_OUTPUT_DIR"

PRESETS = {
    # The licensed-data protocol: 90 notes per (label, gender) cell for
    # training; on the full 672-note corpus this leaves 312 test pairs.
    "mimic-subset": {"per_cell": 90},
}


@dataclass
class RunConfig:
    embedding: Optional[str] = None
    embedding_format: str = "tsv"
    case_policy: str = "fold-lower"
    corpus: Optional[str] = None
    pairs: Optional[str] = None
    targets: Optional[str] = None
    swap_rules: Optional[str] = None
    neutralize_mode: str = "replace"
    learners: Tuple[str, ...] = LEARNER_KINDS
    conditions: Tuple[str, ...] = CONDITIONS
    svm_C: Tuple[float, ...] = HyperparamGrid().svm_C
    svm_kernels: Tuple[str, ...] = HyperparamGrid().svm_kernels
    rf_max_depth: Tuple[int, ...] = HyperparamGrid().rf_max_depth
    mlp_alpha: Tuple[float, ...] = HyperparamGrid().mlp_alpha
    seed: Optional[int] = None
    out_dir: Optional[str] = None
    per_cell: int = 90
    min_per_cell: int = 1
    strict: bool = True
    normalize_pairs: bool = False
    # synth-only knobs
    n_per_cell: int = 70
    dim: int = 8
    strength: float = 1.0
    include_gendered: bool = True

    def grid(self) -> HyperparamGrid:
        return HyperparamGrid(
            svm_C=tuple(self.svm_C),
            svm_kernels=tuple(self.svm_kernels),
            rf_max_depth=tuple(self.rf_max_depth),
            mlp_alpha=tuple(self.mlp_alpha),
        )

    def resolved_out_dir(self) -> Path:
        out = self.out_dir or os.environ.get(OUTPUT_DIR_ENV) or "embfair-out"
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def require(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise SystemExit(f"error: --{name.replace('_', '-')} is required "
                                 f"(flag or config file)")

    def echo(self, out_dir: Path, command: str):
        payload = {"command": command, "version": __version__, **asdict(self)}
        (out_dir / "config.json").write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )


def _merge_config(args) -> RunConfig:
    """Config file values override defaults; explicit flags override both."""
    values = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise SystemExit(f"error: unknown config keys {sorted(unknown)}")
        values.update(data)
    if getattr(args, "preset", None):
        values.update(PRESETS[args.preset])
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    cfg = RunConfig(**values)
    if cfg.neutralize_mode not in NEUTRALIZE_MODES:
        raise SystemExit(f"error: bad neutralize mode {cfg.neutralize_mode!r}")
    for c in cfg.conditions:
        if c not in CONDITIONS:
            raise SystemExit(f"error: unknown condition {c!r}")
    for l in cfg.learners:
        if l not in LEARNER_KINDS:
            raise SystemExit(f"error: unknown learner {l!r}")
    return cfg


def _load_table(cfg):
    cfg.require("embedding")
    return load_vectors(cfg.embedding, format=cfg.embedding_format,
                        case_policy=cfg.case_policy)


def _load_pairs(cfg):
    return load_gender_pairs(cfg.pairs) if cfg.pairs else default_gender_pairs()


def _load_targets(cfg):
    return load_terms(cfg.targets) if cfg.targets else default_target_terms()


def _format_db(bias):
    tag = "" if bias.direction == "neutral" else f"_{bias.direction}"
    return f"{bias.db:.4f}{tag}"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_audit(args) -> int:
    cfg = _merge_config(args)
    table = _load_table(cfg)
    pairs = _load_pairs(cfg)
    targets = _load_targets(cfg)
    out = cfg.resolved_out_dir()

    direction = gender_direction(table, pairs, normalize_words=cfg.normalize_pairs)
    bias = direct_bias(table, direction, targets)

    # Sensitivity note: warn when normalizing the pair vectors first flips
    # the reported direction.
    try:
        alt = direct_bias(
            table, gender_direction(table, pairs, normalize_words=not cfg.normalize_pairs),
            targets,
        )
        if alt.direction != bias.direction:
            log.warning("bias direction %s differs under pair-vector normalization (%s)",
                        bias.direction, alt.direction)
    except GeometryError:
        pass

    (out / "bias.json").write_text(
        json.dumps(bias.to_jsonable(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    write_spectrum_csv(direction, out / "spectrum.csv")
    with (out / "per_word_cosines.csv").open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["term", "signed_cosine"])
        for term, value in bias.per_word.items():
            writer.writerow([term, repr(value)])
    cfg.echo(out, "audit")

    print(f"DB = {_format_db(bias)}  "
          f"(resolved {bias.n_resolved}, missing {bias.n_missing}, "
          f"pairs used {len(direction.pairs_used)})")
    if args.explain:
        print(f"{'term':<24} signed cosine")
        for term, value in sorted(bias.per_word.items(), key=lambda kv: -abs(kv[1])):
            print(f"{term:<24} {value:+.6f}")
    return EXIT_OK


def cmd_transform(args) -> int:
    cfg = _merge_config(args)
    cfg.require("corpus")
    condition = args.condition
    out = cfg.resolved_out_dir()
    rules = load_swap_rules(cfg.swap_rules)
    notes = load_corpus(cfg.corpus, strict=cfg.strict)

    transformed = build_condition(notes, condition, rules, cfg.neutralize_mode)
    dest = out / f"{condition}.jsonl"
    save_corpus(transformed, dest)
    cfg.echo(out, f"transform:{condition}")

    swapped_tokens = 0
    zero_swap = 0
    if condition in ("swapped", "augmented"):
        for note in notes:
            _, n = swap_text(note.text, rules)
            swapped_tokens += n
            zero_swap += n == 0
    print(f"wrote {len(transformed)} notes to {dest} "
          f"(swapped tokens: {swapped_tokens}, zero-swap notes: {zero_swap})")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = _merge_config(args)
    cfg.require("corpus", "embedding", "seed")
    out = cfg.resolved_out_dir()
    table = _load_table(cfg)
    notes = load_corpus(cfg.corpus, strict=cfg.strict)
    rules = load_swap_rules(cfg.swap_rules)

    result = report_matrix(
        notes, table, cfg.grid(), cfg.seed,
        pairs=_load_pairs(cfg), targets=_load_targets(cfg),
        learners=tuple(cfg.learners), conditions=tuple(cfg.conditions),
        rules=rules, neutralize_mode=cfg.neutralize_mode,
        per_cell=cfg.per_cell, min_per_cell=cfg.min_per_cell,
        keep_going=True,
    )
    (out / "report.json").write_text(result.to_json(), encoding="utf-8")
    markdown = render_markdown(result, conditions=tuple(cfg.conditions))
    (out / "report.md").write_text(markdown, encoding="utf-8")
    cfg.echo(out, "experiment")

    print(markdown)
    if result.failures:
        for failure in result.failures:
            print(f"FAILED cell ({failure['condition']}, {failure['learner']}): "
                  f"{failure['error']}", file=sys.stderr)
        return EXIT_ERROR
    print(f"wrote {out / 'report.json'} and {out / 'report.md'}")
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = _merge_config(args)
    cfg.require("seed")
    out = cfg.resolved_out_dir()
    spec = SynthSpec(
        n_per_cell=cfg.n_per_cell, dim=cfg.dim, strength=cfg.strength,
        seed=cfg.seed, include_gendered=cfg.include_gendered,
    )
    fixture = build_fixture(spec)
    write_fixture(fixture, out)
    cfg.echo(out, "synth")
    print(f"wrote {len(fixture.notes)} notes, {len(fixture.table)} vectors "
          f"(dim {fixture.table.dim}, strength {spec.strength:g}) to {out}")
    return EXIT_OK


def write_fixture(fixture: SynthFixture, out: Path):
    save_corpus(fixture.notes, out / "corpus.jsonl")
    write_tsv(fixture.table, out / "embedding.tsv")
    with (out / "pairs.tsv").open("w", encoding="utf-8") as handle:
        for pair in fixture.pairs:
            handle.write(f"{pair.female_word}\t{pair.male_word}\n")
    with (out / "targets.txt").open("w", encoding="utf-8") as handle:
        handle.writelines(term + "\n" for term in fixture.targets)


def cmd_report(args) -> int:
    data = json.loads(Path(args.report).read_text(encoding="utf-8"))
    # Rebuild just enough structure for the renderer.
    from .fairness import FairnessReport, MatrixResult
    from .geometry import BiasScore

    bias = None
    if data.get("bias"):
        b = data["bias"]
        bias = BiasScore(db=b["db"], direction=b["direction"], per_word=b["per_word"],
                         n_resolved=b["n_resolved"], n_missing=b["n_missing"])
    reports = [
        FairnessReport(
            condition=r["condition"], learner_kind=r["learner"],
            macro_f1=r["macro_f1"], fnr_f=r["fnr_f"], fnr_m=r["fnr_m"],
            fnrr=r["fnrr"], advantaged=r["advantaged"],
            mismatch_count=r["mismatch_count"], n_pairs=r["n_pairs"],
            seed=r["seed"], hyperparams=r.get("hyperparams", {}),
        )
        for r in data["reports"]
    ]
    result = MatrixResult(embedding_name=data.get("embedding", "?"),
                          seed=data.get("seed", 0), bias=bias, direction=None,
                          reports=reports, failures=data.get("failures", []))
    markdown = render_markdown(result)
    print(markdown)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.md").write_text(markdown, encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _csv_list(cast):
    def parse(text):
        return tuple(cast(part) for part in text.split(",") if part)
    return parse


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override it")
    sub.add_argument("--out-dir", dest="out_dir",
                     help=f"output directory (default ${OUTPUT_DIR_ENV} or ./embfair-out)")
    sub.add_argument("--seed", type=int, help="explicit RNG seed (required where used)")
    sub.add_argument("-v", "--verbose", action="store_true")
    sub.add_argument("-q", "--quiet", action="store_true")


def _add_embedding_flags(sub):
    sub.add_argument("--embedding", help="vector file path")
    sub.add_argument("--embedding-format", dest="embedding_format",
                     choices=("tsv", "w2v-text"))
    sub.add_argument("--case-policy", dest="case_policy",
                     choices=("fold-lower", "preserve"))


def _add_list_flags(sub):
    sub.add_argument("--pairs", help="gender-pair TSV (default: packaged ten pairs)")
    sub.add_argument("--targets", help="target-term list (default: packaged list)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embfair",
        description="Audit gender bias in word embeddings and its downstream effect "
                    "on note classifiers.",
    )
    parser.add_argument("--version", action="version", version=f"embfair {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("audit", help="bias score + eigenvalue spectrum of a table")
    _add_common(p)
    _add_embedding_flags(p)
    _add_list_flags(p)
    p.add_argument("--normalize-pairs", dest="normalize_pairs", action="store_const",
                   const=True, help="unit-normalize word vectors before differencing")
    p.add_argument("--explain", action="store_true",
                   help="print the per-term cosine table, sorted by |cosine|")
    p.set_defaults(func=cmd_audit)

    p = commands.add_parser("transform", help="write one condition's corpus")
    _add_common(p)
    p.add_argument("--corpus", help="input JSONL corpus")
    p.add_argument("--condition", required=True, choices=CONDITIONS)
    p.add_argument("--swap-rules", dest="swap_rules", help="swap-rules JSON file")
    p.add_argument("--neutralize-mode", dest="neutralize_mode",
                   choices=NEUTRALIZE_MODES)
    p.add_argument("--no-strict", dest="strict", action="store_const", const=False,
                   help="skip malformed JSONL lines instead of aborting")
    p.set_defaults(func=cmd_transform)

    p = commands.add_parser("experiment", help="run the condition x learner matrix")
    _add_common(p)
    _add_embedding_flags(p)
    _add_list_flags(p)
    p.add_argument("--corpus", help="input JSONL corpus")
    p.add_argument("--swap-rules", dest="swap_rules")
    p.add_argument("--neutralize-mode", dest="neutralize_mode", choices=NEUTRALIZE_MODES)
    p.add_argument("--learner", dest="learners", type=_csv_list(str),
                   help="comma list; restricts the matrix (e.g. svm)")
    p.add_argument("--condition", dest="conditions", type=_csv_list(str),
                   help="comma list; restricts the matrix")
    p.add_argument("--per-cell", dest="per_cell", type=int,
                   help="train notes per (label, gender) cell")
    p.add_argument("--min-per-cell", dest="min_per_cell", type=int)
    p.add_argument("--preset", choices=sorted(PRESETS),
                   help="named protocol preset (mimic-subset: 90 per cell)")
    p.add_argument("--svm-c", dest="svm_C", type=_csv_list(float))
    p.add_argument("--svm-kernels", dest="svm_kernels", type=_csv_list(str))
    p.add_argument("--rf-depth", dest="rf_max_depth", type=_csv_list(int))
    p.add_argument("--rf-full-depth", action="store_const", dest="rf_max_depth",
                   const=tuple(range(1, 51)), help="search every depth in [1, 50]")
    p.add_argument("--mlp-alpha", dest="mlp_alpha", type=_csv_list(float))
    p.add_argument("--no-strict", dest="strict", action="store_const", const=False)
    p.set_defaults(func=cmd_experiment)

    p = commands.add_parser("synth", help="generate a synthetic corpus + embedding")
    _add_common(p)
    p.add_argument("--n-per-cell", dest="n_per_cell", type=int,
                   help="notes per (label, gender) cell")
    p.add_argument("--dim", type=int)
    p.add_argument("--strength", type=float,
                   help="planted gender-signal correlation strength in [0, 1]")
    p.add_argument("--no-gendered", dest="include_gendered", action="store_const",
                   const=False, help="leave all pronouns out of the table (OOV)")
    p.set_defaults(func=cmd_synth)

    p = commands.add_parser("report", help="render a report JSON to markdown")
    p.add_argument("--report", required=True, help="report.json produced by experiment")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if getattr(args, "verbose", False) else (
        logging.WARNING if getattr(args, "quiet", False) else logging.INFO
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except (FileNotFoundError, PermissionError, IsADirectoryError) as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    except (VectorFileError, CorpusFormatError, json.JSONDecodeError) as exc:
        log.error("parse failure: %s", exc)
        return EXIT_PARSE
    except (GeometryError, FloatingPointError) as exc:
        log.error("math failure: %s", exc)
        return EXIT_MATH
    except ValueError as exc:
        log.error("math failure: %s", exc)
        return EXIT_MATH
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
