"""Ambiguity, distinctiveness and surprisal-ratio scores for pun sentences.

With ``c_k(w)`` the cosine between a content word ``w`` and meaning word
``m_k`` (the pun word and the alternative word):

* meaning posterior: ``p(m_k | sentence) ∝ prod_w exp(c_k(w))``;
* ambiguity ``A = 100 * H2(p(m_1))`` (binary entropy in bits);
* distinctiveness ``D1 = 100 * mean_w max(0, s_1(w) - 0.5)`` with
  ``s_1(w) = exp(c_1) / (exp(c_1) + exp(c_2))``, and ``D2`` the mirror;
* surprisal ratio: ``d(span) = surprisal(span with pw) - surprisal(span with aw)``
  over a local window around the pun word and over the whole sentence;
  ``S = 1 - d_global / d_local`` if ``d_local > 0``, else
  ``-|d_global| / (|d_local| + eps)``.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .backends.base import LanguageModel
from .text import is_content_word, tokenize
from .types import PunPair

SCALE = 100.0


class UndefinedMetricError(ValueError):
    pass


@dataclass(frozen=True)
class MeaningPosterior:
    p_m1: float
    p_m2: float


def _tokens(sentence: str | Sequence[str]) -> list[str]:
    return tokenize(sentence) if isinstance(sentence, str) else list(sentence)


def _meanings(pair: PunPair) -> tuple[str, str]:
    return pair.steer_pw, pair.steer_aw


def _cosine_table(sentence, pair: PunPair, emb) -> tuple[np.ndarray, np.ndarray]:
    m1, m2 = _meanings(pair)
    for m in (m1, m2):
        if m not in emb:
            raise UndefinedMetricError(f"no vector for meaning word {m!r}")
    skip = {pair.pw.lower(), pair.aw.lower(), m1.lower(), m2.lower()}
    words = [t.lower() for t in _tokens(sentence) if is_content_word(t) and t.lower() not in skip and t.lower() in emb]
    if not words:
        raise UndefinedMetricError("sentence has no content word with a vector")
    c1 = np.array([emb.cosine(w, m1) for w in words], dtype=np.float64)
    c2 = np.array([emb.cosine(w, m2) for w in words], dtype=np.float64)
    return c1, c2


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))


def meaning_posterior(sentence, pair: PunPair, emb) -> MeaningPosterior:
    c1, c2 = _cosine_table(sentence, pair, emb)
    d = float(c1.sum() - c2.sum())
    return MeaningPosterior(float(_sigmoid(d)), float(_sigmoid(-d)))


def binary_entropy(p: float) -> float:
    return -sum(q * math.log2(q) for q in (p, 1.0 - p) if q > 0)


def ambiguity_from_posterior(post: MeaningPosterior) -> float:
    return SCALE * binary_entropy(post.p_m1)


def ambiguity(sentence, pair: PunPair, emb) -> float:
    return ambiguity_from_posterior(meaning_posterior(sentence, pair, emb))


def distinctiveness(sentence, pair: PunPair, emb) -> tuple[float, float]:
    c1, c2 = _cosine_table(sentence, pair, emb)
    s1 = _sigmoid(c1 - c2)
    s2 = _sigmoid(c2 - c1)
    d1 = SCALE * float(np.mean(np.maximum(0.0, s1 - 0.5)))
    d2 = SCALE * float(np.mean(np.maximum(0.0, s2 - 0.5)))
    return d1, d2


def surprisal_ratio_from_parts(s_local: float, s_global: float, eps: float = 1e-6) -> float:
    if s_local > 0:
        return 1.0 - s_global / s_local
    return -abs(s_global) / (abs(s_local) + eps)


def surprisal_parts(sentence, pair: PunPair, lm: LanguageModel, local_window: int = 2) -> tuple[float, float]:
    """(d_local, d_global) in nats."""
    toks = _tokens(sentence)
    low = [t.lower() for t in toks]
    try:
        i = low.index(pair.pw.lower())
    except ValueError:
        raise UndefinedMetricError(f"{pair.pw!r} does not occur in the sentence") from None
    pw, aw = (pair.pw, pair.aw) if not pair.homographic else _meanings(pair)
    with_pw = list(toks)
    with_pw[i] = pw
    with_aw = list(toks)
    with_aw[i] = aw
    lo, hi = max(0, i - local_window), min(len(toks), i + local_window + 1)
    d_local = lm.sequence_surprisal(with_pw[lo:hi]) - lm.sequence_surprisal(with_aw[lo:hi])
    d_global = lm.sequence_surprisal(with_pw) - lm.sequence_surprisal(with_aw)
    return d_local, d_global


def surprisal_ratio(sentence, pair: PunPair, lm: LanguageModel, local_window: int = 2, eps: float = 1e-6) -> float:
    return surprisal_ratio_from_parts(*surprisal_parts(sentence, pair, lm, local_window), eps=eps)


# -- corpus reports ------------------------------------------------------------

COLUMNS = ("system", "n", "A", "D1", "D2", "avg_D", "S", "excluded_A", "excluded_D", "excluded_S")


@dataclass
class SentenceScores:
    system: str
    sentence: str
    A: float | None
    D1: float | None
    D2: float | None
    S: float | None

    @property
    def avg_D(self) -> float | None:
        return None if self.D1 is None else (self.D1 + self.D2) / 2.0


def score_sentence(sentence, pair: PunPair, system: str, emb, lm: LanguageModel | None,
                   local_window: int = 2, eps: float = 1e-6) -> SentenceScores:
    text = sentence if isinstance(sentence, str) else " ".join(sentence)
    try:
        a = ambiguity(sentence, pair, emb)
        d1, d2 = distinctiveness(sentence, pair, emb)
    except UndefinedMetricError:
        a = d1 = d2 = None
    s = None
    if lm is not None:
        try:
            s = surprisal_ratio(sentence, pair, lm, local_window, eps)
        except UndefinedMetricError:
            s = None
    return SentenceScores(system, text, a, d1, d2, s)


def evaluate_corpus(records: Iterable[tuple], emb, lm: LanguageModel | None,
                    local_window: int = 2, eps: float = 1e-6) -> list[dict]:
    """One row per system (in first-seen order) with metric means and exclusion counts."""
    by_system: dict[str, list[SentenceScores]] = defaultdict(list)
    for sentence, pair, system in records:
        by_system[system].append(score_sentence(sentence, pair, system, emb, lm, local_window, eps))
    if not by_system:
        raise ValueError("no records to evaluate")
    rows = []
    for system, scores in by_system.items():
        def mean(attr):
            vals = [getattr(s, attr) for s in scores if getattr(s, attr) is not None]
            return (float(np.mean(vals)) if vals else float("nan")), len(scores) - len(vals)

        a, ex_a = mean("A")
        d1, ex_d = mean("D1")
        d2, _ = mean("D2")
        avg_d, _ = mean("avg_D")
        s, ex_s = mean("S")
        if lm is None:
            ex_s = 0
        rows.append({"system": system, "n": len(scores), "A": a, "D1": d1, "D2": d2, "avg_D": avg_d, "S": s,
                     "excluded_A": ex_a, "excluded_D": ex_d, "excluded_S": ex_s})
    return rows


def report_csv(rows: Sequence[dict], header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{r[k]:.4f}" if isinstance(r[k], float) else r[k]) for k in COLUMNS})
    return buf.getvalue()
