"""Deterministic test doubles whose outputs anyone can recompute.

Hash definition (all mocks):

    u(s) = (int(sha256(s.encode("utf-8")).hexdigest()[:16], 16) + 0.5) / 2**64

which lies strictly inside (0, 1).

``MockLM``
    next-word score of ``w`` after ``prefix``: ``u(" ".join(prefix) + "\\x1f" + w)``,
    normalized over the fixed 1,000-word vocabulary in ``data/mock_vocab.txt``;
    candidates are ordered by score, ties by word.
    mask-fill score of ``c``: ``u(" ".join(template) + "\\x1f" + c)``, normalized
    over the distinct candidates of the batch call.
"""

from __future__ import annotations

import hashlib
import math
from typing import Sequence

import numpy as np

from ..text import _load_list
from ..types import LABELS, PunPair
from .base import Candidate, LanguageModel, MaskedQuery, check_candidates


def hash_unit(s: str) -> float:
    h = int(hashlib.sha256(s.encode("utf-8")).hexdigest()[:16], 16)
    return (h + 0.5) / 2.0**64


def hash_units(key: str, suffixes: Sequence[bytes]) -> np.ndarray:
    """``hash_unit(key + s)`` for many encoded suffixes, sharing the key's hash state."""
    base = hashlib.sha256(key.encode("utf-8"))
    out = np.empty(len(suffixes))
    for i, s in enumerate(suffixes):
        h = base.copy()
        h.update(s)
        out[i] = int.from_bytes(h.digest()[:8], "big")
    return (out + 0.5) / 2.0**64


def mock_vocabulary() -> tuple[str, ...]:
    return _load_list("mock_vocab.txt")


class MockLM(LanguageModel):
    name = "mock"
    concurrent_safe = True

    def __init__(self, vocab: Sequence[str] | None = None, uniform: bool = False):
        self.vocab = tuple(vocab) if vocab is not None else mock_vocabulary()
        self._vocab_set = frozenset(self.vocab)
        self._encoded = [w.encode("utf-8") for w in self.vocab]
        self._alpha = np.argsort(np.array(self.vocab), kind="stable")
        self.uniform = uniform

    def _distribution(self, prefix: Sequence[str], extra: str | None = None) -> tuple[list[str], np.ndarray]:
        words = list(self.vocab)
        encoded = self._encoded
        if extra is not None and extra not in self._vocab_set:
            words.append(extra)
            encoded = encoded + [extra.encode("utf-8")]
        if self.uniform:
            s = np.ones(len(words))
        else:
            s = hash_units(" ".join(prefix) + "\x1f", encoded)
        return words, np.log(s) - math.log(s.sum())

    def next_word_candidates(self, prefix: Sequence[str], n: int) -> list[Candidate]:
        if n < 1:
            raise ValueError("n must be >= 1")
        words, lp = self._distribution(prefix)
        # by score, ties by word
        alpha = self._alpha
        order = alpha[np.argsort(-lp[alpha], kind="stable")][:n]
        return check_candidates([Candidate(words[i], float(lp[i])) for i in order], n)

    def word_logprob(self, context: Sequence[str], word: str) -> float:
        words, lp = self._distribution(context, extra=word)
        return float(lp[words.index(word)])

    def mask_fill_logprobs(self, template: Sequence[str], candidates: Sequence[str]) -> np.ndarray:
        MaskedQuery(tuple(template), candidates[0])
        uniq = list(dict.fromkeys(candidates))
        s = hash_units(" ".join(template) + "\x1f", [c.encode("utf-8") for c in uniq])
        lp = dict(zip(uniq, np.log(s) - math.log(s.sum())))
        return np.array([lp[c] for c in candidates])


class MockPredictor:
    """Next-token-type predictor test double.

    With ``fixed=(label, confidence)`` every call returns exactly that.
    Otherwise the label is ``LABELS[int(u(key) * 3)]`` and the confidence
    ``0.5 + 0.5 * u(key + "\\x1fc")`` with ``key = " ".join(prefix) + "\\x1f" + pw + "\\x1f" + aw``.
    """

    def __init__(self, fixed: tuple[str, float] | None = None, threshold: float = 0.9):
        if fixed is not None and fixed[0] not in LABELS:
            raise ValueError(f"unknown label {fixed[0]!r}")
        self.fixed = fixed
        self.threshold = threshold

    def distribution(self, prefix: Sequence[str], pair: PunPair) -> np.ndarray:
        label, conf = self.predict(prefix, pair)
        rest = (1.0 - conf) / 2.0
        return np.array([conf if lab == label else rest for lab in LABELS])

    def predict(self, prefix: Sequence[str], pair: PunPair) -> tuple[str, float]:
        if self.fixed is not None:
            return self.fixed
        key = " ".join(prefix) + "\x1f" + pair.pw + "\x1f" + pair.aw
        label = LABELS[min(2, int(hash_unit(key) * 3))]
        return label, 0.5 + 0.5 * hash_unit(key + "\x1fc")

    def predict_next_type(self, prefix: Sequence[str], pair: PunPair) -> tuple[str, float, bool]:
        label, conf = self.predict(prefix, pair)
        return label, conf, conf > self.threshold
