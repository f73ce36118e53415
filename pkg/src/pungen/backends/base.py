"""Language-model capabilities the pipeline relies on.

Probabilities travel as natural-log values; ``mask_fill_probability`` is the
only place they are exponentiated.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

MASK = "<mask>"
PROMPT_SEP = "<sep>"
PROMPT_END = "<gen>"


class BackendError(RuntimeError):
    """A backend could not produce a result."""


class MalformedQueryError(ValueError):
    pass


@dataclass(frozen=True)
class MaskedQuery:
    template: tuple[str, ...]
    candidate: str

    def __post_init__(self):
        object.__setattr__(self, "template", tuple(self.template))
        n = sum(1 for t in self.template if t == MASK)
        if n != 1:
            raise MalformedQueryError(f"template must contain exactly one {MASK}, found {n}")
        if not self.candidate or any(ch.isspace() for ch in self.candidate):
            raise MalformedQueryError(f"bad candidate {self.candidate!r}")

    @property
    def mask_index(self) -> int:
        return self.template.index(MASK)


@dataclass(frozen=True)
class Candidate:
    word: str
    logprob: float


def split_prompt(prefix: Sequence[str]) -> tuple[list[str], list[str]]:
    """Split ``[keyword, <sep>, phrase..., <gen>, generated...]`` into (prompt, generated)."""
    prefix = list(prefix)
    if PROMPT_END in prefix:
        k = len(prefix) - 1 - prefix[::-1].index(PROMPT_END)
        return prefix[:k], prefix[k + 1:]
    return [], prefix


def build_prompt(keyword: str, phrase: Sequence[str]) -> list[str]:
    return [keyword, PROMPT_SEP, *phrase, PROMPT_END]


def parse_prompt(prompt: Sequence[str]) -> tuple[str | None, list[str]]:
    prompt = list(prompt)
    if prompt and prompt[-1] == PROMPT_END:
        prompt = prompt[:-1]
    if PROMPT_SEP in prompt:
        i = prompt.index(PROMPT_SEP)
        return (prompt[0] if i > 0 else None), prompt[i + 1:]
    return None, prompt


class LanguageModel(ABC):
    """Mask infilling, next-word candidates and token surprisal."""

    #: whether concurrent callers may share one instance
    concurrent_safe: bool = True
    name: str = "lm"

    @abstractmethod
    def mask_fill_logprobs(self, template: Sequence[str], candidates: Sequence[str]) -> np.ndarray:
        """ln P(candidate | template) for each candidate, as a batch."""

    @abstractmethod
    def next_word_candidates(self, prefix: Sequence[str], n: int) -> list[Candidate]:
        """Up to ``n`` complete words sorted by non-increasing log-probability."""

    @abstractmethod
    def word_logprob(self, context: Sequence[str], word: str) -> float:
        """ln P(word | context)."""

    def mask_fill_probability(self, query: MaskedQuery) -> float:
        return float(math.exp(self.mask_fill_logprobs(query.template, [query.candidate])[0]))

    def word_surprisal(self, context: Sequence[str], word: str) -> float:
        if not word:
            raise ValueError("word must be non-empty")
        return max(0.0, -self.word_logprob(context, word))

    def sequence_surprisal(self, tokens: Sequence[str]) -> float:
        """Sum of per-token surprisals, each conditioned on the tokens before it."""
        tokens = list(tokens)
        return sum(self.word_surprisal(tokens[:i], tokens[i]) for i in range(len(tokens)))


def check_candidates(cands: list[Candidate], n: int) -> list[Candidate]:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not cands:
        raise BackendError("no complete-word candidates")
    return cands[:n]


def rollout_complete_words(
    step: Callable[[tuple], tuple[np.ndarray, np.ndarray]],
    starts: np.ndarray,
    start_logprobs: np.ndarray,
    is_word_start: Callable[[int], bool],
    piece: Callable[[int], str],
    n: int,
    max_steps: int = 4,
) -> list[Candidate]:
    """Roll subword beams forward until each spells a complete word.

    ``step(pieces)`` returns ``(ids, logprobs)`` of the most likely next
    subword pieces after the partial word ``pieces``. A beam is complete
    when its most likely continuation starts a new word; it is otherwise
    extended greedily, at most ``max_steps`` times, and dropped if still
    incomplete.
    """
    words: dict[str, float] = {}
    for sid, slp in zip(starts, start_logprobs):
        pieces = (int(sid),)
        lp = float(slp)
        done = False
        for _ in range(max_steps + 1):
            ids, lps = step(pieces)
            if len(ids) == 0 or is_word_start(int(ids[0])):
                done = True
                break
            if len(pieces) > max_steps:
                break
            pieces = pieces + (int(ids[0]),)
            lp += float(lps[0])
        if not done:
            continue
        word = "".join(piece(p) for p in pieces).strip()
        if word and not any(ch.isspace() for ch in word) and (word not in words or words[word] < lp):
            words[word] = lp
    ranked = sorted(words.items(), key=lambda kv: (-kv[1], kv[0]))
    return [Candidate(w, lp) for w, lp in ranked[:n]]
