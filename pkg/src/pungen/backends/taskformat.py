"""Stand-in for a language model tuned on ``keyword <sep> phrase <gen> sentence`` data.

A model tuned on that format learns to write a short lead-in, then the
keyword and the phrase, then stop. ``PromptCopyLM`` wraps any base model
and reproduces that behaviour by mixing a point mass on the pending prompt
token into the base distribution:

``P(w) = q * [w == target] + (1 - q) * P_base(w)``

The lead-in length is ``1 + int(4 * u(keyword | phrase))`` words, with ``u``
the hash from :mod:`pungen.backends.mock`, so it stays deterministic.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..text import is_word, phrase_progress, word_sequence
from .base import Candidate, LanguageModel, check_candidates, parse_prompt, split_prompt
from .mock import hash_unit

STOP = "."


class PromptCopyLM(LanguageModel):
    def __init__(self, base: LanguageModel, q: float = 0.6):
        if not 0.0 < q < 1.0:
            raise ValueError("q must be in (0, 1)")
        self.base = base
        self.q = q
        self.name = f"prompt-copy({base.name})"
        self.concurrent_safe = base.concurrent_safe

    def target(self, prefix: Sequence[str]) -> str | None:
        """The prompt token the tuned model would favour next, if any."""
        prompt, gen = split_prompt(prefix)
        if not prompt:
            return None
        keyword, phrase = parse_prompt(prompt)
        phrase = [t for t in phrase if is_word(t)]
        words = word_sequence(gen)
        lead = 1 + int(4 * hash_unit((keyword or "") + "\x1f" + " ".join(phrase)))
        if len(words) < lead:
            return None
        done = phrase_progress(gen, phrase)
        if 0 < done < len(phrase):
            return phrase[done]
        has_kw = keyword is None or keyword.lower() in words
        if not has_kw:
            return keyword
        if done == 0:
            return phrase[0] if phrase else STOP
        return STOP

    def _mix(self, word: str, base_lp: float, target: str | None) -> float:
        if target is None:
            return base_lp
        p = (1.0 - self.q) * math.exp(base_lp)
        if word.lower() == target.lower():
            p += self.q
        return math.log(p) if p > 0 else -math.inf

    def next_word_candidates(self, prefix: Sequence[str], n: int) -> list[Candidate]:
        if n < 1:
            raise ValueError("n must be >= 1")
        target = self.target(prefix)
        cands = self.base.next_word_candidates(prefix, n)
        if target is None:
            return cands
        pool = {c.word: c.logprob for c in cands}
        if target not in pool:
            pool[target] = self.base.word_logprob(prefix, target)
        mixed = [Candidate(w, self._mix(w, lp, target)) for w, lp in pool.items()]
        mixed.sort(key=lambda c: (-c.logprob, c.word))
        return check_candidates(mixed, n)

    def word_logprob(self, context: Sequence[str], word: str) -> float:
        return self._mix(word, self.base.word_logprob(context, word), self.target(context))

    def mask_fill_logprobs(self, template: Sequence[str], candidates: Sequence[str]) -> np.ndarray:
        return self.base.mask_fill_logprobs(template, candidates)
