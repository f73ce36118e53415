"""``pungen`` command line.

Exit codes: 0 success, 2 invalid configuration or input, 1 runtime failure.
Every setting of the config file can be overridden with a flag named after
its dotted path, e.g. ``--selection.n1 10`` or ``--backends.lm ngram``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import DEFAULTS, ConfigError, PipelineConfig, flatten
from .io import atomic_write_text, read_jsonl, write_jsonl

log = logging.getLogger("pungen")


class InputError(ValueError):
    """Bad user input (exit code 2)."""


def _meta(cfg: PipelineConfig) -> dict:
    return {"config_hash": cfg.hash(), "seed": cfg["seed"]}


def _override_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="YAML or JSON config file")
    group = p.add_argument_group("config overrides")
    for key, default in flatten(DEFAULTS).items():
        group.add_argument(f"--{key}", dest=f"cfg:{key}", metavar=type(default).__name__.upper(), default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config)
    overrides = {k[4:]: v for k, v in vars(args).items() if k.startswith("cfg:") and v is not None}
    cfg.update(overrides)
    return cfg.validate()


# -- commands --------------------------------------------------------------


def cmd_ingest(args, cfg: PipelineConfig) -> None:
    from .corpus import Corpus

    paths = args.paths or cfg["corpus.paths"]
    if not paths:
        raise InputError("no input files (pass paths or set corpus.paths)")
    corpus = Corpus.ingest_paths(paths)
    corpus.save(args.out, {**_meta(cfg), "inputs": [str(p) for p in paths]})
    log.info("ingested %d sentences into %s", len(corpus), args.out)


def _read_puns(path):
    from .types import PunPair

    rows = read_jsonl(path)
    if not rows:
        raise InputError(f"{path} has no records")
    out = []
    for i, r in enumerate(rows):
        try:
            out.append((r["sentence"], PunPair.from_dict(r)))
        except (KeyError, ValueError) as e:
            raise InputError(f"{path}:{i + 1}: {e}") from None
    return out


def cmd_curate(args, cfg: PipelineConfig) -> None:
    from .labels import curate_classifier_dataset, label_fractions

    from .pipeline import build_embeddings

    puns = _read_puns(args.puns)
    emb = build_embeddings(cfg)
    data = curate_classifier_dataset(puns, emb, cfg["labels.T"])
    meta = _meta(cfg)
    write_jsonl(args.out, ({**ex.to_dict(), **meta} for ex in data))
    fr = label_fractions(ex.label for ex in data)
    log.info("curated %d examples from %d sentences (%s)", len(data), len(puns),
             ", ".join(f"{k}={v:.2f}" for k, v in fr.items()))


def cmd_train(args, cfg: PipelineConfig) -> None:
    from .backends.classifier import train_token_classifier
    from .labels import build_predictor_dataset, label_fractions, read_examples, write_examples
    from .pipeline import build_embeddings

    auto = read_examples(args.data)
    if not auto:
        raise InputError(f"{args.data} has no examples")
    human = read_examples(args.human, source="human") if args.human else []
    emb = build_embeddings(cfg)
    out = Path(args.out)
    meta = _meta(cfg)
    current = train_token_classifier(auto, emb, out / "classifier", mode="current", meta=meta)
    data = build_predictor_dataset(current, auto, human, emb)
    write_examples(out / "predictor_data.jsonl", data)
    train_token_classifier(data, emb, out / "predictor", mode="next", meta=meta)
    report = {**meta, "auto": len(auto), "human": len(human), "predictor_examples": len(data),
              "label_fractions": label_fractions(ex.label for ex in data)}
    atomic_write_text(out / "train_report.json", json.dumps(report, indent=2, sort_keys=True))
    log.info("trained classifier and predictor in %s (%d predictor examples)", out, len(data))


def cmd_generate(args, cfg: PipelineConfig) -> None:
    from .homographic import SensePair
    from .pipeline import (
        build_embeddings, build_lm, build_predictor, build_reverse_dictionary, build_wsd,
        generate_homographic, generate_homophonic, load_corpus,
    )
    from .types import PunPair

    if bool(args.pair) == bool(args.senses):
        raise InputError("pass exactly one of --pair or --senses")
    emb = build_embeddings(cfg)
    lm = build_lm(cfg, emb)
    gen_lm = build_lm(cfg, emb, for_generation=True)
    predictor = build_predictor(cfg, emb)
    needs_corpus = args.senses or args.phrase is None or args.context_word is None
    corpus = None
    if needs_corpus:
        if not args.corpus and not cfg["corpus.paths"]:
            raise InputError("a corpus snapshot (--corpus) or corpus.paths is required")
        corpus = load_corpus(cfg, args.corpus)
    meta = _meta(cfg)
    records = []
    if args.pair:
        try:
            pair = PunPair(*args.pair)
        except ValueError as e:
            raise InputError(str(e)) from None
        rec = generate_homophonic(cfg, pair, corpus, lm, gen_lm, predictor, emb, args.phrase, args.context_word)
        records.append({**meta, **rec})
    else:
        rows = read_jsonl(args.senses)
        if not rows:
            raise InputError(f"{args.senses} has no records")
        rd = build_reverse_dictionary(cfg)
        wsd = build_wsd(cfg, emb)
        for i, r in enumerate(rows):
            try:
                sense = SensePair.from_dict(r)
            except (KeyError, ValueError) as e:
                raise InputError(f"{args.senses}:{i + 1}: {e}") from None
            records.append({**meta, **generate_homographic(cfg, sense, corpus, lm, gen_lm, predictor, emb, rd, wsd)})
    write_jsonl(args.out, records)
    for r in records:
        print(r["sentence"])


def cmd_evaluate(args, cfg: PipelineConfig) -> None:
    from .metrics import evaluate_corpus, report_csv
    from .pipeline import build_embeddings, build_lm
    from .types import PunPair

    rows = read_jsonl(args.records)
    if not rows:
        raise InputError(f"{args.records} has no records")
    recs = []
    for i, r in enumerate(rows):
        try:
            # generate output keeps the pair under "input"
            pair = PunPair.from_dict(r if "pw" in r else r.get("input", {}))
            recs.append((r["sentence"], pair, r.get("system", "default")))
        except (KeyError, ValueError) as e:
            raise InputError(f"{args.records}:{i + 1}: {e}") from None
    emb = build_embeddings(cfg)
    lm = None if args.no_surprisal else build_lm(cfg, emb)
    table = evaluate_corpus(recs, emb, lm, cfg["metrics.local_window"], cfg["metrics.eps"])
    header = f"config_hash={cfg.hash()} seed={cfg['seed']}"
    text = report_csv(table, header)
    atomic_write_text(args.out, text)
    sys.stdout.write(text)


COMMANDS = {
    "ingest": cmd_ingest,
    "curate": cmd_curate,
    "train": cmd_train,
    "generate": cmd_generate,
    "evaluate": cmd_evaluate,
}


def build_parser() -> argparse.ArgumentParser:
    common = _override_parser()
    parser = argparse.ArgumentParser(prog="pungen", description="Pun generation and evaluation pipeline.")
    parser.add_argument("--version", action="version", version=f"pungen {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="segment and index text files into a corpus snapshot")
    p.add_argument("paths", nargs="*")
    p.add_argument("--out", required=True, help="snapshot directory")

    p = sub.add_parser("curate", parents=[common], help="auto-label pun sentences for classifier training")
    p.add_argument("--puns", required=True, help="JSONL with sentence, pw, aw")
    p.add_argument("--out", required=True, help="output JSONL of labeled examples")

    p = sub.add_parser("train", parents=[common], help="train the word classifier and the next-type predictor")
    p.add_argument("--data", required=True, help="curated JSONL")
    p.add_argument("--human", help="JSONL of human labels (same format)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("generate", parents=[common], help="generate puns for a word pair or a sense file")
    p.add_argument("--pair", nargs=2, metavar=("PW", "AW"))
    p.add_argument("--senses", help="JSONL with surface, definition_1, definition_2")
    p.add_argument("--corpus", help="corpus snapshot directory")
    p.add_argument("--phrase", help="use this phrase instead of selecting one")
    p.add_argument("--context-word", help="use this context word instead of selecting one")
    p.add_argument("--out", required=True, help="output JSONL")

    p = sub.add_parser("evaluate", parents=[common], help="score sentences (A, D1, D2, S) per system")
    p.add_argument("--records", required=True, help="JSONL with sentence, pw, aw, system")
    p.add_argument("--no-surprisal", action="store_true", help="skip the language-model metric")
    p.add_argument("--out", required=True, help="output CSV")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        COMMANDS[args.command](args, cfg)
    except (ConfigError, InputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: no such file: {e.filename}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - report any runtime failure as exit 1
        log.debug("runtime failure", exc_info=True)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
