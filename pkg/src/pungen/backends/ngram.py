"""Word-level language model trained on plain sentences.

``KneserNeyTrigram`` is interpolated Kneser-Ney with Ney's discount per
order. Counts live in sorted int64 key arrays so that scoring a whole
vocabulary of candidates is a batch of binary searches.

``NgramTopicLM`` mixes it with a topic component that tilts the unigram
prior toward words whose vectors are close to the content words seen so
far, which gives the model a dependence on context beyond two tokens.
"""

from __future__ import annotations

import math
from collections import Counter
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import _kernels
from ..text import is_content_word
from .base import (
    MASK,
    PROMPT_SEP,
    Candidate,
    LanguageModel,
    MaskedQuery,
    check_candidates,
    parse_prompt,
    split_prompt,
)

UNK, BOS, EOS = "<unk>", "<s>", "</s>"
SPECIALS = (UNK, BOS, EOS)


def _logsumexp(x: np.ndarray) -> float:
    m = float(np.max(x))
    return m + math.log(float(np.sum(np.exp(x - m))))


def _discount(counts: np.ndarray) -> float:
    n1 = int(np.sum(counts == 1))
    n2 = int(np.sum(counts == 2))
    if n1 == 0:
        return 0.5
    return min(0.95, max(0.05, n1 / (n1 + 2.0 * n2)))


class KneserNeyTrigram:
    def __init__(self, vocab: Sequence[str], arrays: dict[str, np.ndarray]):
        self.vocab = list(vocab)
        self.index = {w: i for i, w in enumerate(self.vocab)}
        self.V = len(self.vocab)
        for k, v in arrays.items():
            setattr(self, k, v)
        self.unk, self.bos, self.eos = (self.index[s] for s in SPECIALS)
        self.word_mask = np.ones(self.V, dtype=bool)
        self.word_mask[[self.unk, self.bos, self.eos]] = False

    _ARRAYS = (
        "tri_keys", "tri_counts", "uv_keys", "uv_counts", "uv_types",
        "bi_keys", "bi_cont", "v_cont_total", "v_cont_types", "p1", "unigram", "discounts",
    )

    @classmethod
    def fit(cls, sentences: Sequence[Sequence[str]], min_count: int = 2) -> "KneserNeyTrigram":
        sentences = [[t.lower() for t in s] for s in sentences]
        counts = Counter(t for s in sentences for t in s)
        words = sorted((w for w, c in counts.items() if c >= min_count and w not in SPECIALS), key=lambda w: (-counts[w], w))
        vocab = list(SPECIALS) + words
        index = {w: i for i, w in enumerate(vocab)}
        V = len(vocab)
        unk, bos, eos = 0, 1, 2

        seqs = []
        for s in sentences:
            ids = [bos, bos] + [index.get(t, unk) for t in s] + [eos]
            seqs.append(np.array(ids, dtype=np.int64))
        u = np.concatenate([q[:-2] for q in seqs])
        v = np.concatenate([q[1:-1] for q in seqs])
        w = np.concatenate([q[2:] for q in seqs])

        tri_keys, tri_counts = np.unique((u * V + v) * V + w, return_counts=True)
        tu, rem = np.divmod(tri_keys, V * V)
        tv, tw = np.divmod(rem, V)

        uv_keys, inv = np.unique(tu * V + tv, return_inverse=True)
        uv_counts = np.bincount(inv, weights=tri_counts).astype(np.float64)
        uv_types = np.bincount(inv).astype(np.float64)

        # continuation counts N1+(. v w): distinct left words of each (v, w)
        bi_keys, bi_cont = np.unique(tv * V + tw, return_counts=True)
        bv, bw = np.divmod(bi_keys, V)
        v_cont_total = np.bincount(bv, weights=bi_cont, minlength=V).astype(np.float64)
        v_cont_types = np.bincount(bv, minlength=V).astype(np.float64)

        d3 = _discount(tri_counts)
        d2 = _discount(bi_cont)
        w_cont = np.bincount(bw, minlength=V).astype(np.float64)  # N1+(. w)
        d1 = _discount(w_cont[w_cont > 0])
        total = w_cont.sum()
        seen = float(np.sum(w_cont > 0))
        p1 = np.maximum(w_cont - d1, 0.0) / total + d1 * seen / total / V
        unigram = np.bincount(np.concatenate([q[2:] for q in seqs]), minlength=V).astype(np.float64)

        arrays = {
            "tri_keys": tri_keys, "tri_counts": tri_counts.astype(np.float64),
            "uv_keys": uv_keys, "uv_counts": uv_counts, "uv_types": uv_types,
            "bi_keys": bi_keys, "bi_cont": bi_cont.astype(np.float64),
            "v_cont_total": v_cont_total, "v_cont_types": v_cont_types,
            "p1": p1, "unigram": unigram, "discounts": np.array([d1, d2, d3]),
        }
        return cls(vocab, arrays)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp.npz")
        np.savez_compressed(tmp, vocab=np.array(self.vocab), **{k: getattr(self, k) for k in self._ARRAYS})
        tmp.replace(path)

    @classmethod
    def load(cls, path: str | Path) -> "KneserNeyTrigram":
        data = np.load(path, allow_pickle=False)
        return cls([str(x) for x in data["vocab"]], {k: data[k] for k in cls._ARRAYS})

    def ids(self, tokens: Sequence[str]) -> np.ndarray:
        return np.array([self.index.get(t.lower(), self.unk) for t in tokens], dtype=np.int64)

    # -- probabilities -----------------------------------------------------

    def _p2(self, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        d2 = self.discounts[1]
        cont = _kernels.sorted_lookup(self.bi_keys, self.bi_cont, v * self.V + w, 0.0)
        tot = self.v_cont_total[v]
        types = self.v_cont_types[v]
        p1 = self.p1[w]
        with np.errstate(divide="ignore", invalid="ignore"):
            p = (np.maximum(cont - d2, 0.0) + d2 * types * p1) / tot
        return np.where(tot > 0, p, p1)

    def _p3(self, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        d3 = self.discounts[2]
        V = self.V
        c = _kernels.sorted_lookup(self.tri_keys, self.tri_counts, (u * V + v) * V + w, 0.0)
        uv = u * V + v
        cuv = _kernels.sorted_lookup(self.uv_keys, self.uv_counts, uv, 0.0)
        tuv = _kernels.sorted_lookup(self.uv_keys, self.uv_types, uv, 0.0)
        p2 = self._p2(v, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            p = (np.maximum(c - d3, 0.0) + d3 * tuv * p2) / cuv
        return np.where(cuv > 0, p, p2)

    def logprob_ids(self, context: np.ndarray, w: np.ndarray) -> np.ndarray:
        """ln P(w | context) for arrays of words sharing one context of 0-2 ids.

        Shorter contexts fall back to the lower orders.
        """
        w = np.asarray(w, dtype=np.int64)
        if len(context) >= 2:
            u = np.full(w.shape, context[-2])
            v = np.full(w.shape, context[-1])
            p = self._p3(u, v, w)
        elif len(context) == 1:
            p = self._p2(np.full(w.shape, context[-1]), w)
        else:
            p = self.p1[w]
        return np.log(np.maximum(p, 1e-300))

    def logprob(self, context: Sequence[str], word: str) -> float:
        return float(self.logprob_ids(self.ids(context), self.ids([word]))[0])

    def next_logprobs(self, context: Sequence[str]) -> np.ndarray:
        """Full next-word log distribution over the vocabulary."""
        return self.logprob_ids(self.ids(context), np.arange(self.V))

    def fill_scores(self, template: Sequence[str], extra_id: int | None = None) -> np.ndarray:
        """Log-score of the template with each vocabulary id at the mask.

        Only the mask position and the two tokens after it depend on the filler.
        """
        q = MaskedQuery(tuple(template), "x")
        m = q.mask_index
        ids = self.ids([t if t != MASK else UNK for t in template])
        fill = np.arange(self.V, dtype=np.int64)
        left = ids[max(0, m - 2):m]
        score = self.logprob_ids(left, fill)
        for j in range(m + 1, min(len(ids), m + 3)):
            target = np.full(self.V, ids[j])
            if j == m + 1:
                if m >= 1:
                    p = self._p3(np.full(self.V, ids[m - 1]), fill, target)
                else:
                    p = self._p2(fill, target)
            else:
                p = self._p3(fill, np.full(self.V, ids[m + 1]), target)
            score = score + np.log(np.maximum(p, 1e-300))
        return score


class NgramTopicLM(LanguageModel):
    """``lam * KN(w | last two words) + (1 - lam) * topic(w | content words of the context)``.

    The topic distribution is ``softmax(log unigram(w) + beta * cos(w, mean context vector))``.
    Prompt tokens (keyword and phrase before ``<gen>``) only feed the topic part.
    """

    name = "ngram-topic"
    concurrent_safe = True

    def __init__(self, kn: KneserNeyTrigram, embeddings, lam: float = 0.7, beta: float = 12.0):
        self.kn = kn
        self.emb = embeddings
        self.lam = lam
        self.beta = beta
        dim = embeddings.dim
        self._E = np.zeros((kn.V, dim), dtype=np.float32)
        for i, w in enumerate(kn.vocab):
            if w not in SPECIALS and w in embeddings:
                self._E[i] = embeddings.unit(w)
        uni = kn.unigram.copy()
        uni[[kn.unk, kn.bos]] = 0.0
        uni = uni + 0.1
        uni[kn.bos] = 0.0
        self._log_uni = np.log(np.maximum(uni / uni.sum(), 1e-300))
        self._word_ids = np.flatnonzero(kn.word_mask)

    def _split(self, context: Sequence[str]) -> tuple[list[str], list[str]]:
        prompt, gen = split_prompt(context)
        if prompt:
            kw, phrase = parse_prompt(prompt)
            topic_words = ([kw] if kw else []) + [t for t in phrase if t != PROMPT_SEP] + gen
            # generation starts a fresh sentence
            return [BOS, BOS] + [t.lower() for t in gen], [t.lower() for t in topic_words]
        toks = [t.lower() for t in context]
        return toks, toks

    def _topic_logprobs(self, topic_words: Sequence[str]) -> np.ndarray:
        vecs = [self.emb.unit(t) for t in topic_words if is_content_word(t) and t in self.emb]
        if not vecs:
            return self._log_uni
        mean = np.mean(vecs, axis=0)
        logits = self._log_uni + self.beta * (self._E @ mean)
        logits[self.kn.bos] = -np.inf
        return logits - _logsumexp(logits[np.isfinite(logits)])

    def _mixture(self, kn_lp: np.ndarray, topic_lp: np.ndarray) -> np.ndarray:
        return np.logaddexp(math.log(self.lam) + kn_lp, math.log1p(-self.lam) + topic_lp)

    def word_logprob(self, context: Sequence[str], word: str) -> float:
        kn_ctx, topic_words = self._split(context)
        wid = self.kn.ids([word])
        kn_lp = self.kn.logprob_ids(self.kn.ids(kn_ctx[-2:]), wid)
        topic = self._topic_logprobs(topic_words)[wid]
        return float(self._mixture(kn_lp, topic)[0]) + self._oov_share(word)

    def next_logprobs(self, context: Sequence[str]) -> np.ndarray:
        kn_ctx, topic_words = self._split(context)
        kn_lp = self.kn.logprob_ids(self.kn.ids(kn_ctx[-2:]), np.arange(self.kn.V))
        return self._mixture(kn_lp, self._topic_logprobs(topic_words))

    def next_word_candidates(self, prefix: Sequence[str], n: int) -> list[Candidate]:
        if n < 1:
            raise ValueError("n must be >= 1")
        lp = self.next_logprobs(prefix)
        ids = self._word_ids
        if self.kn.eos is not None:
            ids = np.append(ids, self.kn.eos)
        order = ids[np.lexsort((ids, -lp[ids]))][:n]
        return check_candidates([Candidate(self.kn.vocab[i], float(lp[i])) for i in order], n)

    def _oov_share(self, word: str) -> float:
        """Log-share of the unknown-token mass given to one out-of-vocabulary word.

        The vocabulary drops words seen fewer than ``min_count`` times, so the
        unknown token's training count approximates the number of dropped types.
        """
        if word.lower() in self.kn.index:
            return 0.0
        return -math.log(max(1.0, float(self.kn.unigram[self.kn.unk])))

    def mask_fill_logprobs(self, template: Sequence[str], candidates: Sequence[str]) -> np.ndarray:
        """Mixture of the trigram slot posterior and the topic distribution given every
        content word of the template (both sides of the mask)."""
        MaskedQuery(tuple(template), candidates[0])
        kn = self.kn
        mask = kn.word_mask.copy()
        mask[kn.unk] = True
        scores = kn.fill_scores(template)
        slot = scores - _logsumexp(scores[mask])
        topic = self._topic_logprobs([t.lower() for t in template if t != MASK])
        topic = topic - _logsumexp(topic[mask])
        out = np.empty(len(candidates))
        for k, c in enumerate(candidates):
            i = kn.index.get(c.lower(), kn.unk)
            if not mask[i]:
                i = kn.unk
            out[k] = self._mixture(np.array([slot[i]]), np.array([topic[i]]))[0] + self._oov_share(c)
        return out
