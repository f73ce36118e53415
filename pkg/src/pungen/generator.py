"""Sentence generation from a keyword and a phrase, steered word by word by a token-type predictor.

At each step the language model proposes ``n`` candidate words. If the
predictor is confident (confidence strictly above the threshold) the
candidates are re-ordered by closeness to the pun word (D1), the
alternative word (D2) or both (A) and the best one is taken; otherwise the
model's own top word is kept. Once the first two words of the phrase have
been produced, the rest of the phrase is emitted verbatim.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .backends.base import BackendError, Candidate, LanguageModel, build_prompt
from .corpus import Corpus, DegenerateWindowError, extract_phrase, rake_keywords
from .text import EOS_TOKENS, detokenize, is_word, phrase_progress, word_sequence
from .types import PunPair


class DecodeError(RuntimeError):
    pass


# -- task-format data ------------------------------------------------------


@dataclass(frozen=True)
class FinetuneRecord:
    keyword: str
    phrase: tuple[str, ...]
    sentence: tuple[str, ...]

    def prompt(self) -> list[str]:
        return build_prompt(self.keyword, self.phrase)

    def to_dict(self) -> dict:
        return {"keyword": self.keyword, "phrase": detokenize(self.phrase), "sentence": detokenize(self.sentence)}


def prepare_finetune_data(corpus: Corpus, window: int = 3) -> tuple[list[FinetuneRecord], Counter]:
    """One record per usable sentence: the top RAKE word is the keyword and the
    second anchors the phrase; sentences where the keyword falls inside the
    phrase are skipped. Returns the records and a counter of skip reasons."""
    records = []
    skipped: Counter = Counter()
    for i, sent in enumerate(corpus.sentences):
        kws = rake_keywords(sent)
        if len(kws) < 2:
            skipped["fewer_than_two_keywords"] += 1
            continue
        keyword, anchor = kws[0], kws[1]
        try:
            phrase = extract_phrase(sent, anchor, window, sentence_id=i)
        except DegenerateWindowError:
            skipped["degenerate_phrase"] += 1
            continue
        if keyword in {t.lower() for t in phrase.tokens}:
            skipped["keyword_inside_phrase"] += 1
            continue
        records.append(FinetuneRecord(keyword, phrase.tokens, tuple(sent)))
    return records, skipped


# -- decoding --------------------------------------------------------------


@dataclass(frozen=True)
class GenInput:
    pair: PunPair
    context_word: str
    phrase: tuple[str, ...]
    max_length: int = 50
    n: int = 20
    threshold: float = 0.9
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phrase", tuple(self.phrase))
        cw = self.context_word.lower()
        if cw in {self.pair.pw.lower(), self.pair.aw.lower()}:
            raise ValueError("context word must differ from the pun and alternative words")
        if word_sequence(self.phrase).count(self.pair.pw.lower()) != 1:
            raise ValueError(f"phrase must contain {self.pair.pw!r} exactly once: {list(self.phrase)}")
        if self.max_length < 1 or self.n < 1:
            raise ValueError("max_length and n must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")

    def prompt(self) -> list[str]:
        return build_prompt(self.context_word, self.phrase)

    def to_dict(self) -> dict:
        return {
            **self.pair.to_dict(),
            "context_word": self.context_word,
            "phrase": list(self.phrase),
            "max_length": self.max_length,
            "n": self.n,
            "threshold": self.threshold,
            "seed": self.seed,
        }


@dataclass
class DecodeState:
    phrase: tuple[str, ...]
    prefix: list[str] = field(default_factory=list)
    phrase_cursor: int = 0
    enforcing: bool = False
    done: bool = False
    enforced: bool = False
    steps: list[dict] = field(default_factory=list)

    @property
    def phrase_length(self) -> int:
        return len(word_sequence(self.phrase))

    def forced_token(self) -> str | None:
        """Next phrase word while enforcing; punctuation inside the phrase is not re-emitted."""
        if not self.enforcing:
            return None
        seen = 0
        for tok in self.phrase:
            if is_word(tok):
                if seen == self.phrase_cursor:
                    return tok
                seen += 1
        return None

    def push(self, word: str, max_length: int) -> None:
        self.prefix.append(word)
        self.phrase_cursor = phrase_progress(self.prefix, self.phrase)
        if self.phrase_cursor >= 2 and self.phrase_cursor < self.phrase_length:
            self.enforcing = True
            self.enforced = True
        elif self.phrase_cursor >= self.phrase_length:
            self.enforcing = False
        if word in EOS_TOKENS and not self.enforcing:
            self.done = True
        if len(self.prefix) >= max_length:
            self.done = True

    @property
    def phrase_complete(self) -> bool:
        return self.phrase_cursor >= self.phrase_length


def relevance_score(word: str, targets: Sequence[str], emb) -> float:
    """Cosine to the target (sum of cosines for two targets); 0 for words without a vector."""
    if word not in emb:
        return 0.0
    return float(sum(emb.cosine(word, t) for t in targets if t in emb))


def steering_targets(label: str, pair: PunPair) -> tuple[str, ...]:
    if label == "D1":
        return (pair.steer_pw,)
    if label == "D2":
        return (pair.steer_aw,)
    return (pair.steer_pw, pair.steer_aw)


def rerank(cands: Sequence[Candidate], label: str, pair: PunPair, emb) -> list[Candidate]:
    """Stable sort by relevance to the label's targets; equal scores keep model order."""
    targets = steering_targets(label, pair)
    scores = [relevance_score(c.word, targets, emb) for c in cands]
    order = sorted(range(len(cands)), key=lambda i: -scores[i])
    return [cands[i] for i in order]


def discriminative_step(
    state: DecodeState,
    inp: GenInput,
    predictor,
    backend: LanguageModel,
    emb,
    banned: Iterable[str] = (),
) -> tuple[str, DecodeState]:
    if state.done:
        raise DecodeError("decoding already finished")
    forced = state.forced_token()
    if forced is not None:
        state.steps.append({"label": None, "confidence": None, "steered": False, "forced": True,
                            "chosen": forced, "topk": []})
        state.push(forced, inp.max_length)
        return forced, state
    banned = {b.lower() for b in banned}
    try:
        cands = backend.next_word_candidates(inp.prompt() + state.prefix, inp.n)
    except BackendError as e:
        raise DecodeError(str(e)) from e
    cands = [c for c in cands if c.word.lower() not in banned]
    if not cands:
        raise DecodeError(f"no candidates at step {len(state.steps)}")
    label, conf = predictor.predict(state.prefix, inp.pair)
    steered = conf > inp.threshold
    chosen = rerank(cands, label, inp.pair, emb)[0].word if steered else cands[0].word
    state.steps.append({
        "label": label, "confidence": round(float(conf), 6), "steered": steered, "forced": False,
        "chosen": chosen, "topk": [[c.word, round(c.logprob, 6)] for c in cands],
    })
    state.push(chosen, inp.max_length)
    return chosen, state


@dataclass(frozen=True)
class GenerationResult:
    input: GenInput
    tokens: tuple[str, ...]
    steps: tuple[dict, ...]
    enforced: bool
    incomplete_phrase: bool

    @property
    def text(self) -> str:
        return detokenize([t for t in self.tokens if t != "</s>"])

    def to_record(self) -> dict:
        return {
            "input": self.input.to_dict(),
            "sentence": self.text,
            "tokens": list(self.tokens),
            "enforced": self.enforced,
            "incomplete_phrase": self.incomplete_phrase,
            "steps": list(self.steps),
        }


def generate(
    inp: GenInput, predictor, backend: LanguageModel, emb, banned: Iterable[str] = ()
) -> GenerationResult:
    banned = tuple(banned)
    state = DecodeState(inp.phrase)
    while not state.done:
        discriminative_step(state, inp, predictor, backend, emb, banned)
    return _result(inp, state)


def _result(inp: GenInput, state: DecodeState) -> GenerationResult:
    return GenerationResult(inp, tuple(state.prefix), tuple(state.steps), state.enforced, not state.phrase_complete)


def replay(inp: GenInput, steps: Sequence[dict]) -> GenerationResult:
    """Rebuild a generation from its step log without any model calls.

    Forced steps are re-derived from the phrase rule and must agree with the log.
    """
    state = DecodeState(inp.phrase)
    it: Iterator[dict] = iter(steps)
    while not state.done:
        try:
            step = next(it)
        except StopIteration:
            raise DecodeError("step log ends before decoding finished") from None
        forced = state.forced_token()
        if forced is not None:
            if not step.get("forced") or step["chosen"] != forced:
                raise DecodeError(f"log disagrees with phrase enforcement at step {len(state.steps)}")
        elif step.get("forced"):
            raise DecodeError(f"log forces a word where no enforcement applies (step {len(state.steps)})")
        state.steps.append(dict(step))
        state.push(step["chosen"], inp.max_length)
    if next(it, None) is not None:
        raise DecodeError("step log continues past the end of decoding")
    return _result(inp, state)
