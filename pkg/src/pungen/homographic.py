"""Homographic puns: one spelling, two senses.

Each sense definition is turned into a stand-in word with a reverse
dictionary (e.g. a sentence in grammar -> "clause", a court sentence ->
"conviction"). Retrieved phrases are sense-tagged with a WSD backend, and
the task then runs like a homophonic one: the stand-ins drive scoring,
labeling and steering while the surface word stays in the text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .backends.base import LanguageModel
from .backends.lexical import WSD, ReverseDictionary
from .corpus import Corpus, DegenerateWindowError, Phrase, extract_phrase
from .generator import GenInput
from .selection import ContextSelection, PhraseSelection, RetrievalError, select_context_word, select_phrase
from .types import PunPair

SENSE_TAGS = ("sense_1", "sense_2", "unknown")


class NoSubstituteError(LookupError):
    pass


class ConversionError(RuntimeError):
    pass


@dataclass(frozen=True)
class SensePair:
    surface: str
    sense_1: str
    sense_2: str

    def __post_init__(self):
        if not self.surface or any(ch.isspace() for ch in self.surface):
            raise ValueError(f"surface must be a single word, got {self.surface!r}")
        d1, d2 = self.sense_1.strip(), self.sense_2.strip()
        if not d1 or not d2:
            raise ValueError("sense definitions must be non-empty")
        if " ".join(d1.lower().split()) == " ".join(d2.lower().split()):
            raise ValueError("sense definitions must differ")

    def swapped(self) -> "SensePair":
        return SensePair(self.surface, self.sense_2, self.sense_1)

    @classmethod
    def from_dict(cls, d: dict) -> "SensePair":
        return cls(d["surface"], d["definition_1"], d["definition_2"])

    def to_dict(self) -> dict:
        return {"surface": self.surface, "definition_1": self.sense_1, "definition_2": self.sense_2}


@dataclass(frozen=True)
class SubstitutePair:
    sub_pw: str
    sub_aw: str
    candidates_1: tuple[tuple[str, float], ...] = ()
    candidates_2: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.sub_pw.lower() == self.sub_aw.lower():
            raise ValueError("substitutes must differ")

    def to_dict(self) -> dict:
        return {
            "sub_pw": self.sub_pw, "sub_aw": self.sub_aw,
            "candidates_1": [list(c) for c in self.candidates_1],
            "candidates_2": [list(c) for c in self.candidates_2],
        }


def _target_index(tokens: Sequence[str], surface: str, hint: int | None = None) -> int:
    low = surface.lower()
    if hint is not None and 0 <= hint < len(tokens) and tokens[hint].lower() == low:
        return hint
    for i, t in enumerate(tokens):
        if t.lower() == low:
            return i
    raise ValueError(f"{surface!r} does not occur in {list(tokens)}")


def disambiguate_phrases(
    phrases: Sequence[Phrase], sense: SensePair, wsd: WSD, margin: float = 0.05
) -> list[tuple[Phrase, str]]:
    """Tag each phrase with the better-scoring sense, or ``unknown`` when the
    two normalized scores are closer than ``margin``."""
    out = []
    for ph in phrases:
        i = _target_index(ph.tokens, sense.surface, ph.anchor_position)
        s1, s2 = (float(x) for x in wsd.sense_scores(ph.tokens, i, [sense.sense_1, sense.sense_2]))
        if abs(s1 - s2) < margin:
            tag = "unknown"
        else:
            tag = "sense_1" if s1 > s2 else "sense_2"
        out.append((ph, tag))
    return out


def reverse_lookup(definition: str, rd: ReverseDictionary, k: int = 10, surface: str | None = None) -> list[tuple[str, float]]:
    """Single-word candidates for a definition, without the surface word."""
    if not definition.strip():
        raise ValueError("definition must be non-empty")
    banned = surface.lower() if surface else None
    out = []
    for word, score in rd.lookup(definition, k + (1 if banned else 0) + 10):
        w = word.strip()
        if not w or any(ch.isspace() or ch == "_" for ch in w) or w.lower() == banned:
            continue
        out.append((w, float(score)))
        if len(out) == k:
            break
    if not out:
        raise NoSubstituteError(f"no single-word candidate for {definition!r}")
    return out


def choose_substitutes(sense: SensePair, rd: ReverseDictionary, k: int = 10) -> SubstitutePair:
    failed, found = [], []
    for name, d in (("sense_1", sense.sense_1), ("sense_2", sense.sense_2)):
        try:
            found.append(reverse_lookup(d, rd, k, sense.surface))
        except NoSubstituteError:
            failed.append(name)
    if failed:
        raise ConversionError(f"reverse dictionary found nothing for {', '.join(failed)} of {sense.surface!r}")
    c1, c2 = found
    sub_pw = c1[0][0]
    others = [w for w, _ in c2 if w.lower() != sub_pw.lower()]
    if not others:
        raise ConversionError(f"sense_2 of {sense.surface!r} has no candidate distinct from {sub_pw!r}")
    return SubstitutePair(sub_pw, others[0], tuple(c1), tuple(c2))


@dataclass(frozen=True)
class Conversion:
    sense: SensePair
    substitutes: SubstitutePair
    pair: PunPair
    phrase: PhraseSelection
    context: ContextSelection
    tags: tuple[tuple[int, str], ...] = field(default=(), repr=False)

    @property
    def banned(self) -> tuple[str, ...]:
        return (self.substitutes.sub_pw, self.substitutes.sub_aw)

    def gen_input(self, **decode) -> GenInput:
        return GenInput(self.pair, self.context.word, self.phrase.phrase.tokens, **decode)

    def to_dict(self) -> dict:
        return {
            "sense": self.sense.to_dict(),
            "substitutes": self.substitutes.to_dict(),
            "phrase_selection": self.phrase.to_dict(),
            "context_selection": self.context.to_dict(),
            "sense_tags": [list(t) for t in self.tags],
        }


def convert(
    sense: SensePair,
    corpus: Corpus,
    lm: LanguageModel,
    rd: ReverseDictionary,
    wsd: WSD,
    n1: int = 20,
    n2: int = 20,
    window: int = 3,
    seed: int = 0,
    margin: float = 0.05,
    k: int = 10,
) -> Conversion:
    """Substitutes, a sense-2 phrase and a sense-1 context word for a homographic task."""
    subs = choose_substitutes(sense, rd, k)
    pair = PunPair(sense.surface, sense.surface, (subs.sub_pw, subs.sub_aw), (sense.sense_1, sense.sense_2))
    phrases = []
    for i in corpus.sentences_containing(sense.surface):
        try:
            phrases.append(extract_phrase(corpus.sentences[i], sense.surface, window, sentence_id=i))
        except DegenerateWindowError:
            continue
    if not phrases:
        raise ConversionError(f"no corpus sentence contains {sense.surface!r}")
    tagged = disambiguate_phrases(phrases, sense, wsd, margin)
    by_tag = {t: [ph for ph, tag in tagged if tag == t] for t in SENSE_TAGS}
    if not by_tag["sense_2"]:
        raise ConversionError(f"no phrase of {sense.surface!r} tagged with sense_2")
    if not by_tag["sense_1"]:
        raise ConversionError(f"no sentence of {sense.surface!r} tagged with sense_1")
    phrase = select_phrase(corpus, pair, lm, n1=n1, window=window, phrases=by_tag["sense_2"][:n1])
    try:
        context = select_context_word(
            corpus, pair, n2=n2, seed=seed,
            pw_sentences=[ph.source_sentence_id for ph in by_tag["sense_1"]],
            aw_sentences=[ph.source_sentence_id for ph in by_tag["sense_2"]],
        )
    except RetrievalError as e:
        raise ConversionError(str(e)) from e
    tags = tuple((ph.source_sentence_id, tag) for ph, tag in tagged)
    return Conversion(sense, subs, pair, phrase, context, tags)
