"""Reverse-dictionary and word-sense-disambiguation services.

Both are small interfaces so the homographic pipeline can run against
real lexical resources or against fixed test doubles.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Mapping, Sequence

import numpy as np

from ..text import is_content_word, tokenize


class ReverseDictionary(ABC):
    name = "reverse-dictionary"
    concurrent_safe = True

    @abstractmethod
    def lookup(self, definition: str, k: int) -> list[tuple[str, float]]:
        """Up to ``k`` (word, score) pairs, best first; entries may be multiword."""


class WSD(ABC):
    name = "wsd"
    concurrent_safe = True

    @abstractmethod
    def sense_scores(self, tokens: Sequence[str], target_index: int, definitions: Sequence[str]) -> np.ndarray:
        """Scores over ``definitions`` for the word at ``target_index``; non-negative, summing to 1."""


class StaticReverseDictionary(ReverseDictionary):
    """Fixed definition -> candidate table.

    Definitions not in the table fall back to echoing their own content
    words, so a one-word definition returns that word.
    """

    name = "static"

    def __init__(self, table: Mapping[str, Sequence[str]] | None = None):
        self.table = {self._key(d): list(ws) for d, ws in (table or {}).items()}

    @staticmethod
    def _key(definition: str) -> str:
        return " ".join(definition.lower().split())

    def lookup(self, definition: str, k: int) -> list[tuple[str, float]]:
        words = self.table.get(self._key(definition))
        if words is None:
            words = list(dict.fromkeys(t.lower() for t in tokenize(definition) if is_content_word(t)))
        return [(w, 1.0 / (r + 1)) for r, w in enumerate(words[:k])]


class WordNetReverseDictionary(ReverseDictionary):
    """Ranks WordNet lemmas by TF-IDF similarity between the query and synset glosses.

    A lemma's score is the best similarity over the synsets it names.
    """

    name = "wordnet"

    def __init__(self, synsets=None):
        from sklearn.feature_extraction.text import TfidfVectorizer

        from ..resources import read_synsets
        from ..text import STOPWORDS

        self.synsets = synsets if synsets is not None else read_synsets()
        docs = [" ".join(ss.definitions) for ss in self.synsets]
        self.vectorizer = TfidfVectorizer(stop_words=sorted(STOPWORDS), sublinear_tf=True, token_pattern=r"[a-z][a-z'\-]+")
        self.matrix = self.vectorizer.fit_transform(docs)

    def lookup(self, definition: str, k: int) -> list[tuple[str, float]]:
        q = self.vectorizer.transform([definition.lower()])
        sims = (self.matrix @ q.T).toarray().ravel()
        out: dict[str, float] = {}
        for i in np.argsort(-sims, kind="stable")[: 20 * k]:
            if sims[i] <= 0:
                break
            for lemma in self.synsets[i].lemmas:
                out.setdefault(lemma, float(sims[i]))
            if len(out) >= 4 * k:
                break
        ranked = sorted(out.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:k]


class EmbeddingWSD(WSD):
    """Gloss matching in vector space.

    Each definition is represented by the mean vector of its content words,
    the occurrence by the mean vector of the other content words around it.
    Cosines are turned into a distribution with ``softmax(cos / temperature)``.
    """

    name = "embedding-gloss"

    def __init__(self, emb, temperature: float = 0.1):
        self.emb = emb
        self.temperature = temperature

    def _mean(self, words: Sequence[str]) -> np.ndarray | None:
        vecs = [self.emb.unit(w) for w in words if is_content_word(w) and w in self.emb]
        if not vecs:
            return None
        v = np.mean(vecs, axis=0)
        n = np.linalg.norm(v)
        return v / n if n > 0 else None

    def sense_scores(self, tokens: Sequence[str], target_index: int, definitions: Sequence[str]) -> np.ndarray:
        target = tokens[target_index].lower()
        ctx = self._mean([t.lower() for i, t in enumerate(tokens) if i != target_index and t.lower() != target])
        cos = np.zeros(len(definitions))
        if ctx is not None:
            for j, d in enumerate(definitions):
                dv = self._mean([t.lower() for t in tokenize(d) if t.lower() != target])
                cos[j] = float(ctx @ dv) if dv is not None else 0.0
        z = cos / self.temperature
        e = np.exp(z - z.max())
        return e / e.sum()


class MockWSD(WSD):
    """Returns fixed scores per occurrence text; unknown occurrences get a uniform distribution."""

    name = "mock"

    def __init__(self, fixed: Mapping[str, Sequence[float]] | None = None):
        self.fixed = {" ".join(k.lower().split()): np.asarray(v, dtype=np.float64) for k, v in (fixed or {}).items()}

    def sense_scores(self, tokens: Sequence[str], target_index: int, definitions: Sequence[str]) -> np.ndarray:
        v = self.fixed.get(" ".join(t.lower() for t in tokens))
        if v is None:
            return np.full(len(definitions), 1.0 / len(definitions))
        v = np.maximum(v[: len(definitions)], 0.0)
        return v / v.sum()
