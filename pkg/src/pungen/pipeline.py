"""Backend construction from a config, and the end-to-end generation flow."""

from __future__ import annotations

import json
from pathlib import Path

from .backends.lexical import EmbeddingWSD, MockWSD, StaticReverseDictionary
from .backends.mock import MockLM, MockPredictor
from .backends.taskformat import PromptCopyLM
from .config import PipelineConfig
from .corpus import Corpus
from .embeddings import EmbeddingTable, HashedEmbeddings
from .generator import GenInput, generate
from .homographic import SensePair, convert
from .labels import LabelPredictor
from .selection import select_context_word, select_phrase
from .text import tokenize
from .types import PunPair


def build_embeddings(cfg: PipelineConfig):
    kind = cfg["backends.embeddings"]
    if kind == "hashed":
        return HashedEmbeddings()
    from .resources import wordnet_embeddings

    return wordnet_embeddings()


def build_lm(cfg: PipelineConfig, emb, for_generation: bool = False):
    if cfg["backends.lm"] == "mock":
        lm = MockLM()
    else:
        from .resources import wordnet_language_model

        lm = wordnet_language_model(emb if isinstance(emb, EmbeddingTable) else None)
    if for_generation and cfg["backends.prompt_copy"]:
        lm = PromptCopyLM(lm)
    return lm


def build_predictor(cfg: PipelineConfig, emb):
    spec = cfg["backends.predictor"]
    if spec == "mock":
        return MockPredictor(threshold=cfg["labels.T_c"])
    return LabelPredictor(spec, emb, cfg["labels.T_c"])


def build_wsd(cfg: PipelineConfig, emb):
    return MockWSD() if cfg["backends.wsd"] == "mock" else EmbeddingWSD(emb)


def build_reverse_dictionary(cfg: PipelineConfig):
    spec = cfg["backends.reverse_dictionary"]
    if spec == "wordnet":
        from .backends.lexical import WordNetReverseDictionary

        return WordNetReverseDictionary()
    return StaticReverseDictionary(json.loads(Path(spec).read_text(encoding="utf-8")))


def load_corpus(cfg: PipelineConfig, snapshot: str | Path | None = None) -> Corpus:
    if snapshot is not None:
        return Corpus.load(snapshot)
    return Corpus.ingest_paths(cfg["corpus.paths"])


def _decode_args(cfg: PipelineConfig) -> dict:
    return {"max_length": cfg["generation.max_length"], "n": cfg["generation.n"],
            "threshold": cfg["labels.T_c"], "seed": cfg["seed"]}


def generate_homophonic(
    cfg: PipelineConfig,
    pair: PunPair,
    corpus: Corpus | None,
    lm,
    gen_lm,
    predictor,
    emb,
    phrase: str | None = None,
    context_word: str | None = None,
) -> dict:
    record: dict = {"kind": "homophonic"}
    if phrase is None:
        sel = select_phrase(corpus, pair, lm, n1=cfg["selection.n1"], window=cfg["corpus.window"],
                            workers=cfg["workers"])
        phrase_tokens = sel.phrase.tokens
        record["phrase_selection"] = sel.to_dict()
    else:
        phrase_tokens = tuple(tokenize(phrase))
    if context_word is None:
        ctx = select_context_word(corpus, pair, n2=cfg["selection.n2"], seed=cfg["seed"], delta=cfg["selection.delta"])
        context_word = ctx.word
        record["context_selection"] = ctx.to_dict()
    inp = GenInput(pair, context_word, phrase_tokens, **_decode_args(cfg))
    record.update(generate(inp, predictor, gen_lm, emb).to_record())
    return record


def generate_homographic(cfg: PipelineConfig, sense: SensePair, corpus: Corpus, lm, gen_lm, predictor, emb,
                         rd, wsd) -> dict:
    conv = convert(sense, corpus, lm, rd, wsd, n1=cfg["selection.n1"], n2=cfg["selection.n2"],
                   window=cfg["corpus.window"], seed=cfg["seed"], margin=cfg["homographic.wsd_margin"],
                   k=cfg["homographic.k"])
    result = generate(conv.gen_input(**_decode_args(cfg)), predictor, gen_lm, emb, banned=conv.banned)
    return {"kind": "homographic", "conversion": conv.to_dict(), **result.to_record()}
