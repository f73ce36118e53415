"""Sentence corpus with a word index, RAKE keywords, TF-IDF and phrase windows."""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .backends.base import MASK
from .io import atomic_write_lines
from .text import CLAUSE_BREAKS, STOPWORDS, detokenize, is_word, split_sentences, tokenize

SNAPSHOT_FORMAT = 1


class EmptyCorpusError(ValueError):
    pass


class WordNotFoundError(LookupError):
    pass


class DegenerateWindowError(ValueError):
    pass


@dataclass(frozen=True)
class Phrase:
    tokens: tuple[str, ...]
    anchor_position: int
    source_sentence_id: int = -1

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if len(self.tokens) < 2:
            raise DegenerateWindowError(f"phrase needs at least 2 tokens, got {list(self.tokens)}")
        if not 0 <= self.anchor_position < len(self.tokens):
            raise ValueError("anchor_position outside the phrase")

    @property
    def anchor(self) -> str:
        return self.tokens[self.anchor_position]

    def masked(self) -> tuple[str, ...]:
        return self.replaced(MASK)

    def replaced(self, word: str) -> tuple[str, ...]:
        toks = list(self.tokens)
        toks[self.anchor_position] = word
        return tuple(toks)

    @property
    def text(self) -> str:
        return detokenize(self.tokens)

    def to_dict(self) -> dict:
        return {"tokens": list(self.tokens), "anchor_position": self.anchor_position, "source_sentence_id": self.source_sentence_id}


class Corpus:
    """Immutable list of tokenized sentences plus a case-folded inverted index."""

    def __init__(self, sentences: Sequence[Sequence[str]]):
        if not sentences:
            raise EmptyCorpusError("corpus has no sentences")
        self.sentences: tuple[tuple[str, ...], ...] = tuple(tuple(s) for s in sentences)
        postings: dict[str, list[int]] = defaultdict(list)
        for i, sent in enumerate(self.sentences):
            for w in sorted({t.lower() for t in sent if is_word(t)}):
                postings[w].append(i)
        self.index: dict[str, np.ndarray] = {w: np.array(ids, dtype=np.int64) for w, ids in postings.items()}

    @classmethod
    def ingest(cls, text: str | Iterable[str]) -> "Corpus":
        """Segment one text, or several documents, into tokenized sentences."""
        docs = [text] if isinstance(text, str) else list(text)
        sentences = []
        for doc in docs:
            for s in split_sentences(doc):
                toks = tokenize(s)
                if any(is_word(t) for t in toks):
                    sentences.append(toks)
        if not sentences:
            raise EmptyCorpusError("no sentences found in input")
        return cls(sentences)

    @classmethod
    def ingest_paths(cls, paths: Iterable[str | Path]) -> "Corpus":
        return cls.ingest([Path(p).read_text(encoding="utf-8") for p in paths])

    def __len__(self) -> int:
        return len(self.sentences)

    def text(self, i: int) -> str:
        return detokenize(self.sentences[i])

    def doc_freq(self, word: str) -> int:
        ids = self.index.get(word.lower())
        return 0 if ids is None else int(ids.size)

    def sentences_containing(self, word: str) -> list[int]:
        if not word:
            raise ValueError("word must be non-empty")
        ids = self.index.get(word.lower())
        return [] if ids is None else ids.tolist()

    # -- snapshot ---------------------------------------------------------

    def save(self, directory: str | Path, meta: dict | None = None) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        sent_lines = (json.dumps({"id": i, "text": self.text(i), "tokens": list(s)}) for i, s in enumerate(self.sentences))
        index_lines = (json.dumps({"word": w, "postings": self.index[w].tolist()}) for w in sorted(self.index))
        atomic_write_lines(directory / "sentences.jsonl", sent_lines)
        atomic_write_lines(directory / "index.jsonl", index_lines)
        atomic_write_lines(directory / "manifest.json", [json.dumps({"format": SNAPSHOT_FORMAT, "sentences": len(self), **(meta or {})}, sort_keys=True)])

    @classmethod
    def load(cls, directory: str | Path) -> "Corpus":
        directory = Path(directory)
        rows = [json.loads(line) for line in (directory / "sentences.jsonl").read_text(encoding="utf-8").splitlines() if line]
        rows.sort(key=lambda r: r["id"])
        corpus = cls([r.get("tokens") or tokenize(r["text"]) for r in rows])
        index_path = directory / "index.jsonl"
        if index_path.exists():
            stored = {}
            for line in index_path.read_text(encoding="utf-8").splitlines():
                if line:
                    r = json.loads(line)
                    stored[r["word"]] = r["postings"]
            if stored.keys() != corpus.index.keys() or any(stored[w] != corpus.index[w].tolist() for w in stored):
                raise ValueError(f"index.jsonl in {directory} does not match sentences.jsonl")
        return corpus


def extract_phrase(
    sentence: Sequence[str],
    target: str,
    window: int = 3,
    sentence_id: int = -1,
    breaks: frozenset[str] = CLAUSE_BREAKS,
) -> Phrase:
    """Up to ``window`` tokens either side of the first occurrence of ``target``.

    The window stops at sentence ends and at clause punctuation in ``breaks``.
    """
    low = [t.lower() for t in sentence]
    try:
        pos = low.index(target.lower())
    except ValueError:
        raise WordNotFoundError(f"{target!r} not in sentence") from None
    lo = pos
    while lo > 0 and pos - lo < window and sentence[lo - 1] not in breaks:
        lo -= 1
    hi = pos
    while hi + 1 < len(sentence) and hi - pos < window and sentence[hi + 1] not in breaks:
        hi += 1
    return Phrase(tuple(sentence[lo:hi + 1]), pos - lo, sentence_id)


def _rake_word(token: str) -> bool:
    return token[:1].isalpha() and token.lower() not in STOPWORDS


def _chunks(tokens: Sequence[str]) -> list[list[str]]:
    chunks: list[list[str]] = []
    cur: list[str] = []
    for t in tokens:
        if is_word(t) and _rake_word(t):
            cur.append(t.lower())
        elif cur:
            chunks.append(cur)
            cur = []
    if cur:
        chunks.append(cur)
    return chunks


def rake_scores(sentence: Sequence[str] | str) -> dict[str, float]:
    """Single-word RAKE scores.

    Candidate chunks are maximal runs of non-stopwords between stopwords and
    punctuation. Word score = degree / frequency; a chunk scores the sum of
    its words; each word then takes the best score of any chunk holding it.
    """
    tokens = tokenize(sentence) if isinstance(sentence, str) else list(sentence)
    chunks = _chunks(tokens)
    freq: Counter[str] = Counter()
    degree: Counter[str] = Counter()
    for ch in chunks:
        for w in ch:
            freq[w] += 1
            degree[w] += len(ch)
    best: dict[str, float] = {}
    for ch in chunks:
        s = sum(degree[w] / freq[w] for w in ch)
        for w in ch:
            best[w] = max(best.get(w, 0.0), s)
    return best


def rake_keywords(sentence: Sequence[str] | str) -> list[str]:
    """Words ranked by RAKE score, ties alphabetical."""
    scores = rake_scores(sentence)
    return sorted(scores, key=lambda w: (-scores[w], w))


def tfidf_scores(
    corpus: Corpus, words: Sequence[str], cooccurring_with: str, sentence_ids: Sequence[int] | None = None
) -> dict[str, float]:
    """tf within the sentences containing ``cooccurring_with`` times ln(N / df) over the whole corpus.

    ``sentence_ids`` narrows the tf sentences to a subset (e.g. one sense of the word).
    """
    if not words:
        raise ValueError("words must be non-empty")
    ids = corpus.sentences_containing(cooccurring_with) if sentence_ids is None else list(sentence_ids)
    tf: Counter[str] = Counter()
    for i in ids:
        tf.update(t.lower() for t in corpus.sentences[i])
    n = len(corpus)
    out = {}
    for w in words:
        df = corpus.doc_freq(w)
        out[w] = tf[w.lower()] * math.log(n / df) if df else 0.0
    return out
