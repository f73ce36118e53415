"""Choosing the generation inputs: a phrase built around the alternative word and a context word for the pun word."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .backends.base import LanguageModel
from .corpus import Corpus, DegenerateWindowError, Phrase, extract_phrase, rake_keywords, tfidf_scores
from .text import STOPWORDS
from .types import PunPair


class RetrievalError(LookupError):
    pass


class InsufficientCandidatesError(RuntimeError):
    pass


@dataclass(frozen=True)
class PhraseCandidate:
    phrase: Phrase
    p_aw: float
    p_pw: float
    rank_aw: int
    rank_pw: int | None  # None when dropped in the first stage

    @property
    def kept(self) -> bool:
        return self.rank_pw is not None

    def to_dict(self) -> dict:
        return {
            **self.phrase.to_dict(),
            "p_aw": self.p_aw, "p_pw": self.p_pw, "rank_aw": self.rank_aw, "rank_pw": self.rank_pw,
        }


@dataclass(frozen=True)
class PhraseSelection:
    phrase: Phrase  # anchor already replaced by the pun word
    source: Phrase
    p_aw: float
    p_pw: float
    rank_aw: int
    rank_pw: int
    candidates: tuple[PhraseCandidate, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "phrase": list(self.phrase.tokens),
            "anchor_position": self.phrase.anchor_position,
            "source_sentence_id": self.source.source_sentence_id,
            "p_aw": self.p_aw, "p_pw": self.p_pw, "rank_aw": self.rank_aw, "rank_pw": self.rank_pw,
            "candidates": [c.to_dict() for c in self.candidates],
        }


def retrieve_phrases(corpus: Corpus, word: str, n1: int = 20, window: int = 3) -> list[Phrase]:
    """Phrases around the first occurrence of ``word`` in up to ``n1`` sentences, in corpus order."""
    out = []
    for i in corpus.sentences_containing(word):
        try:
            out.append(extract_phrase(corpus.sentences[i], word, window, sentence_id=i))
        except DegenerateWindowError:
            continue
        if len(out) == n1:
            break
    return out


def _ranks(values: Sequence[float]) -> list[int]:
    """1 = largest; ties keep input order."""
    order = sorted(range(len(values)), key=lambda i: -values[i])
    ranks = [0] * len(values)
    for r, i in enumerate(order, 1):
        ranks[i] = r
    return ranks


def infill_probabilities(
    lm: LanguageModel, phrases: Sequence[Phrase], first: str, second: str, workers: int = 1
) -> np.ndarray:
    """(len(phrases), 2) array of P(first | masked) and P(second | masked)."""

    def one(ph: Phrase) -> np.ndarray:
        return np.exp(lm.mask_fill_logprobs(ph.masked(), [first, second]))

    if workers > 1 and lm.concurrent_safe:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(one, phrases))
    else:
        rows = [one(ph) for ph in phrases]
    return np.array(rows).reshape(len(phrases), 2)


def select_phrase(
    corpus: Corpus,
    pair: PunPair,
    lm: LanguageModel,
    n1: int = 20,
    window: int = 3,
    phrases: Sequence[Phrase] | None = None,
    workers: int = 1,
) -> PhraseSelection:
    """Keep the half of the phrases where the alternative word fits best, then
    take the survivor of median fit for the pun word (lower median).

    Homographic pairs score with their substitute words; ``phrases`` lets the
    caller supply pre-filtered candidates (e.g. those tagged with one sense).
    """
    if phrases is None:
        phrases = retrieve_phrases(corpus, pair.aw, n1, window)
        if not phrases:
            raise RetrievalError(f"no corpus sentence contains {pair.aw!r}")
    phrases = list(phrases)[:n1]
    if not phrases:
        raise RetrievalError("no candidate phrases")
    probs = infill_probabilities(lm, phrases, pair.steer_aw, pair.steer_pw, workers)
    p_aw, p_pw = probs[:, 0].tolist(), probs[:, 1].tolist()
    rank_aw = _ranks(p_aw)
    keep = math.ceil(len(phrases) / 2)
    survivors = [i for i in range(len(phrases)) if rank_aw[i] <= keep]
    if len(survivors) < 2:
        raise InsufficientCandidatesError(f"{len(survivors)} phrase(s) left after the first ranking; need 2")
    sub_ranks = _ranks([p_pw[i] for i in survivors])
    rank_pw: dict[int, int] = dict(zip(survivors, sub_ranks))
    by_rank = sorted(survivors, key=lambda i: rank_pw[i])
    chosen = by_rank[(len(by_rank) - 1) // 2]
    cands = tuple(
        PhraseCandidate(phrases[i], p_aw[i], p_pw[i], rank_aw[i], rank_pw.get(i)) for i in range(len(phrases))
    )
    src = phrases[chosen]
    out = Phrase(src.replaced(pair.pw), src.anchor_position, src.source_sentence_id)
    return PhraseSelection(out, src, p_aw[chosen], p_pw[chosen], rank_aw[chosen], rank_pw[chosen], cands)


@dataclass(frozen=True)
class ContextSelection:
    word: str
    tfidf: float
    pool: tuple[tuple[str, float], ...]
    seed: int
    degraded: bool = False

    def to_dict(self) -> dict:
        return {"word": self.word, "tfidf": self.tfidf, "pool": [list(p) for p in self.pool],
                "seed": self.seed, "degraded": self.degraded}


def select_context_word(
    corpus: Corpus,
    pair: PunPair,
    n2: int = 20,
    seed: int = 0,
    delta: int = 0,
    pw_sentences: Sequence[int] | None = None,
    aw_sentences: Sequence[int] | None = None,
) -> ContextSelection:
    """Sample one of the top-``n2`` TF-IDF keywords of the pun word's sentences
    that appear in at most ``delta`` of the alternative word's sentences.

    If that leaves nothing, the co-occurrence filter is dropped and the result
    is flagged ``degraded``.
    """
    pw_ids = corpus.sentences_containing(pair.pw) if pw_sentences is None else list(pw_sentences)
    if not pw_ids:
        raise RetrievalError(f"no corpus sentence contains {pair.pw!r}")
    aw_ids = corpus.sentences_containing(pair.aw) if aw_sentences is None else list(aw_sentences)
    banned = {pair.pw.lower(), pair.aw.lower(), pair.steer_pw.lower(), pair.steer_aw.lower()} | STOPWORDS
    keywords = sorted({w for i in pw_ids for w in rake_keywords(corpus.sentences[i]) if w not in banned})
    if not keywords:
        raise RetrievalError(f"no keywords in the sentences of {pair.pw!r}")
    scores = tfidf_scores(corpus, keywords, pair.pw, sentence_ids=pw_ids)
    ranked = sorted(keywords, key=lambda w: (-scores[w], w))
    aw_sets = [{t.lower() for t in corpus.sentences[i]} for i in aw_ids]

    def unique(w: str) -> bool:
        return sum(1 for s in aw_sets if w in s) <= delta

    pool = [w for w in ranked if unique(w)][:n2]
    degraded = not pool
    if degraded:
        pool = ranked[:n2]
    rng = np.random.default_rng(seed)
    word = pool[int(rng.integers(len(pool)))]
    return ContextSelection(word, scores[word], tuple((w, scores[w]) for w in pool), seed, degraded)
