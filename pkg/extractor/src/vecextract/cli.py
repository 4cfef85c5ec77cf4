"""CLI: fill a template per word, run the checkpoint, write a TSV.

Examples:
    vecextract --checkpoint bert-base-cased --words terms.txt \\
        --template "{X} is a synonym of depression." --out targets.tsv
    vecextract --checkpoint bert-base-cased --kind gender --pairs pairs.tsv \\
        --template "{X} is a person." --out gendered.tsv
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from .extract import (
    ExtractionError,
    TemplateSpec,
    extract_to_tsv,
    load_checkpoint,
    read_pairs_file,
    read_words_file,
)

log = logging.getLogger("vecextract")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="vecextract",
        description="Export word-level vectors from a transformer checkpoint "
                    "into the TSV vector-file format.",
    )
    parser.add_argument("--checkpoint", required=True,
                        help="model name or local checkpoint directory")
    parser.add_argument("--template", required=True,
                        help="sentence with a {X} slot, e.g. '{X} is a synonym of depression.'")
    parser.add_argument("--kind", choices=("target", "gender"), default="target")
    parser.add_argument("--words", help="word/phrase list file (target kind)")
    parser.add_argument("--pairs", help="female<TAB>male pair file (gender kind)")
    parser.add_argument("--layer", type=int, default=-1,
                        help="hidden-state index; 0 = embedding layer, -1 = final (default)")
    parser.add_argument("--out", required=True, help="output TSV path")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr, force=True)
    try:
        if args.kind == "target":
            if not args.words:
                raise SystemExit("error: --words is required for target extraction")
            fillers = tuple(read_words_file(args.words))
        else:
            if not args.pairs:
                raise SystemExit("error: --pairs is required for gender extraction")
            fillers = tuple(read_pairs_file(args.pairs))
        spec = TemplateSpec(kind=args.kind, template=args.template, fillers=fillers)
        checkpoint = load_checkpoint(args.checkpoint)
        n = extract_to_tsv(checkpoint, spec, args.out, layer=args.layer)
        # Sidecar metadata: the layer and pooling are defaults a reader of
        # the bare TSV could not otherwise recover.
        meta = {
            "checkpoint": args.checkpoint,
            "kind": args.kind,
            "template": args.template,
            "layer": args.layer,
            "pooling": "subword-mean",
            "hidden_size": checkpoint.hidden_size,
            "rows": n,
        }
        Path(str(args.out) + ".meta.json").write_text(
            json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    except (FileNotFoundError, OSError) as exc:
        log.error("I/O failure: %s", exc)
        return 3
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return 4
    except ExtractionError as exc:
        log.error("extraction failed: %s", exc)
        return 5
    print(f"wrote {n} vectors to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
