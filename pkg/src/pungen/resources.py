"""WordNet-derived text and the cached backends trained on it.

No pretrained transformer or GloVe weights are required: the "real"
backends are a Kneser-Ney trigram/topic language model and skip-gram
vectors trained on WordNet 3.0 glosses, examples and lemma names. The
WordNet database is located via ``PUNGEN_WORDNET_DIR`` or the data bundled
with the ``wn==0.0.23`` distribution.
"""

from __future__ import annotations

import hashlib
import importlib.util
import json
import logging
import os
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .text import tokenize

log = logging.getLogger(__name__)

POS_FILES = ("noun", "verb", "adj", "adv")
CACHE_VERSION = "2"


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Synset:
    offset: str
    pos: str
    lemmas: tuple[str, ...]
    definitions: tuple[str, ...]
    examples: tuple[str, ...]


def wordnet_dir() -> Path:
    env = os.environ.get("PUNGEN_WORDNET_DIR")
    if env:
        path = Path(env)
    else:
        spec = importlib.util.find_spec("wn")
        if spec is None or not spec.submodule_search_locations:
            raise ResourceError("WordNet data not found: install wn==0.0.23 or set PUNGEN_WORDNET_DIR")
        path = Path(list(spec.submodule_search_locations)[0]) / "data" / "wordnet-3.0"
    if not (path / "data.noun").exists():
        raise ResourceError(f"no WordNet data files in {path}")
    return path


def cache_dir() -> Path:
    path = Path(os.environ.get("PUNGEN_CACHE", Path.home() / ".cache" / "pungen"))
    path.mkdir(parents=True, exist_ok=True)
    return path


_QUOTED = re.compile(r'"([^"]*)"')


def _parse_gloss(gloss: str) -> tuple[list[str], list[str]]:
    examples = [e.strip() for e in _QUOTED.findall(gloss) if e.strip()]
    rest = _QUOTED.sub("", gloss)
    definitions = [d.strip(" ;") for d in rest.split(";") if d.strip(" ;")]
    return definitions, examples


@lru_cache(maxsize=2)
def read_synsets(path: str | None = None) -> tuple[Synset, ...]:
    root = Path(path) if path else wordnet_dir()
    out = []
    for pos in POS_FILES:
        with open(root / f"data.{pos}", encoding="utf-8", errors="replace") as fh:
            for line in fh:
                if line.startswith("  "):
                    continue
                head, _, gloss = line.partition(" | ")
                fields = head.split()
                n_words = int(fields[3], 16)
                lemmas = tuple(fields[4 + 2 * i].split("(")[0].replace("_", " ").lower() for i in range(n_words))
                defs, exs = _parse_gloss(gloss.strip())
                out.append(Synset(fields[0], fields[2], lemmas, tuple(defs), tuple(exs)))
    return tuple(out)


def gloss_sentences(synsets=None) -> list[list[str]]:
    """Definitions and usage examples as lower-cased token lists."""
    synsets = synsets if synsets is not None else read_synsets()
    out = []
    for ss in synsets:
        for text in ss.definitions + ss.examples:
            toks = [t.lower() for t in tokenize(text)]
            if len(toks) >= 2:
                out.append(toks)
    return out


def synset_documents(synsets=None) -> list[list[str]]:
    """Lemma names followed by definitions and examples, one sequence per synset."""
    synsets = synsets if synsets is not None else read_synsets()
    out = []
    for ss in synsets:
        toks: list[str] = []
        for lemma in ss.lemmas:
            toks.extend(lemma.split())
        for text in ss.definitions + ss.examples:
            toks.extend(t.lower() for t in tokenize(text) if t.isalpha())
        if len(toks) >= 2:
            out.append(toks)
    return out


def _fingerprint(root: Path, extra: dict) -> str:
    h = hashlib.sha256()
    h.update(CACHE_VERSION.encode())
    for pos in POS_FILES:
        st = (root / f"data.{pos}").stat()
        h.update(f"{pos}:{st.st_size}".encode())
    h.update(json.dumps(extra, sort_keys=True).encode())
    return h.hexdigest()[:16]


SGNS_PARAMS = {"dim": 100, "window": 5, "negative": 5, "epochs": 10, "min_count": 3, "batch": 16, "seed": 0}


def wordnet_embeddings(params: dict | None = None):
    """Skip-gram vectors trained on WordNet synset documents (trained once, then cached)."""
    from .embeddings import EmbeddingTable, centered, train_skipgram

    params = {**SGNS_PARAMS, **(params or {})}
    root = wordnet_dir()
    path = cache_dir() / f"wordnet-sgns-{_fingerprint(root, params)}.npz"
    if path.exists():
        return EmbeddingTable.load(path)
    log.info("training skip-gram vectors on WordNet (cached at %s)", path)
    table = centered(train_skipgram(synset_documents(), **params))
    table.save(path)
    return table


def wordnet_language_model(embeddings=None):
    """Kneser-Ney trigram + embedding-topic model over WordNet glosses and examples."""
    from .backends.ngram import KneserNeyTrigram, NgramTopicLM

    root = wordnet_dir()
    path = cache_dir() / f"wordnet-kn3-{_fingerprint(root, {'min_count': 2})}.npz"
    if path.exists():
        kn = KneserNeyTrigram.load(path)
    else:
        log.info("counting WordNet trigrams (cached at %s)", path)
        kn = KneserNeyTrigram.fit(gloss_sentences(), min_count=2)
        kn.save(path)
    emb = embeddings if embeddings is not None else wordnet_embeddings()
    return NgramTopicLM(kn, emb)
