import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pungen.backends.base import Candidate, LanguageModel, build_prompt
from pungen.backends.mock import MockLM, MockPredictor
from pungen.backends.taskformat import PromptCopyLM
from pungen.corpus import Corpus, extract_phrase, rake_keywords
from pungen.embeddings import EmbeddingTable, HashedEmbeddings
from pungen.generator import (
    DecodeError, DecodeState, GenInput, discriminative_step, generate, prepare_finetune_data, relevance_score,
    replay, rerank,
)
from pungen.types import PunPair

PAIR = PunPair("soled", "sold")
PHRASE = ("were", "soled", "at", "the", "store")


class ScriptLM(LanguageModel):
    """Proposes ``script[k]`` at generation step k, then a full stop."""

    def __init__(self, script):
        self.script = script

    def next_word_candidates(self, prefix, n):
        k = len(prefix) - prefix.index("<gen>") - 1
        words = self.script[k] if k < len(self.script) else ["."]
        return [Candidate(w, -float(i)) for i, w in enumerate(words)][:n]

    def word_logprob(self, context, word):
        return -1.0

    def mask_fill_logprobs(self, template, candidates):
        return np.zeros(len(candidates))


def test_finetune_records_on_1000_sentences():
    rng = np.random.default_rng(0)
    content = ["leather", "boots", "store", "price", "farmer", "apples", "river", "bridge", "music", "violin",
               "garden", "roses", "winter", "snow", "castle", "knight"]
    stops = ["the", "a", "of", "at", "was", "and", "in", "on"]
    text = []
    for _ in range(1000):
        n = int(rng.integers(2, 14))
        text.append(" ".join(rng.choice(content if rng.random() < 0.5 else stops) for _ in range(n)).capitalize() + ".")
    corpus = Corpus.ingest("\n".join(text))
    assert len(corpus) == 1000
    records, skipped = prepare_finetune_data(corpus, window=3)
    assert len(records) + sum(skipped.values()) == 1000
    assert records
    for rec in records:
        kws = rake_keywords(rec.sentence)
        assert rec.keyword == kws[0]
        assert tuple(rec.phrase) == extract_phrase(rec.sentence, kws[1], 3).tokens
        assert rec.keyword not in {t.lower() for t in rec.phrase}
        assert rec.prompt() == build_prompt(rec.keyword, rec.phrase)


def test_gen_input_validation():
    GenInput(PAIR, "leather", PHRASE)
    with pytest.raises(ValueError):
        GenInput(PAIR, "sold", PHRASE)
    with pytest.raises(ValueError):
        GenInput(PAIR, "leather", ("were", "sold", "here"))
    with pytest.raises(ValueError):
        GenInput(PAIR, "leather", PHRASE, threshold=1.5)


def test_relevance_scores():
    emb = EmbeddingTable(["a", "b", "c"], np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
    assert relevance_score("a", ["a"], emb) == pytest.approx(1.0)
    assert relevance_score("a", ["b"], emb) == pytest.approx(0.0)
    assert relevance_score("c", ["a", "b"], emb) == pytest.approx(2 / np.sqrt(2))
    assert relevance_score("zzz", ["a"], emb) == 0.0


def test_relevance_follows_the_vectors(wordnet_vectors):
    e = wordnet_vectors
    mane = relevance_score("fashion", ["mane"], e)
    main = relevance_score("fashion", ["main"], e)
    assert (mane > main) == (e.cosine("fashion", "mane") > e.cosine("fashion", "main"))


def test_rerank_is_stable():
    emb = EmbeddingTable(["soled", "sold", "x", "y"], np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]]))
    cands = [Candidate("x", -1), Candidate("sold", -2), Candidate("y", -3), Candidate("soled", -4)]
    assert [c.word for c in rerank(cands, "D1", PAIR, emb)] == ["soled", "x", "sold", "y"]
    assert [c.word for c in rerank(cands, "D2", PAIR, emb)] == ["sold", "x", "y", "soled"]
    assert [c.word for c in rerank(cands, "A", PAIR, emb)][:2] == ["sold", "soled"]


def test_phrase_enforcement_after_two_words():
    lm = ScriptLM([["the"], ["shoes"], ["were"], ["soled"], ["cheaply"]])
    inp = GenInput(PAIR, "leather", PHRASE)
    res = generate(inp, MockPredictor(fixed=("A", 0.5)), lm, HashedEmbeddings())
    assert res.tokens == ("the", "shoes", "were", "soled", "at", "the", "store", ".")
    assert res.enforced and not res.incomplete_phrase
    assert [s["forced"] for s in res.steps] == [False] * 4 + [True] * 3 + [False]


def test_no_enforcement_before_two_words():
    lm = ScriptLM([["were"], ["cheap"], ["."]])
    res = generate(GenInput(PAIR, "leather", PHRASE), MockPredictor(fixed=("A", 0.5)), lm, HashedEmbeddings())
    assert res.tokens == ("were", "cheap", ".")
    assert not res.enforced and res.incomplete_phrase


def test_max_length_and_banned_words():
    lm = ScriptLM([["sold", "soled", "x"]] * 100)
    inp = GenInput(PAIR, "leather", PHRASE, max_length=5)
    res = generate(inp, MockPredictor(fixed=("A", 0.5)), lm, HashedEmbeddings(), banned=["SOLD"])
    assert len(res.tokens) == 5 and "sold" not in res.tokens
    assert all("sold" not in [w for w, _ in s["topk"]] for s in res.steps)
    with pytest.raises(DecodeError):
        generate(inp, MockPredictor(fixed=("A", 0.5)), ScriptLM([["sold"]]), HashedEmbeddings(), banned=["sold"])


def test_step_after_done():
    state = DecodeState(PHRASE, done=True)
    with pytest.raises(DecodeError):
        discriminative_step(state, GenInput(PAIR, "leather", PHRASE), MockPredictor(), MockLM(), HashedEmbeddings())


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 10**6))
def test_generation_is_replayable(seed):
    rng = np.random.default_rng(seed)
    inp = GenInput(PAIR, "leather", PHRASE, max_length=int(rng.integers(3, 30)), threshold=float(rng.random()))
    res = generate(inp, MockPredictor(), PromptCopyLM(MockLM()), HashedEmbeddings())
    again = replay(inp, res.steps)
    assert again.tokens == res.tokens and again.enforced == res.enforced
    if res.enforced and not res.incomplete_phrase:
        words = [t.lower() for t in res.tokens]
        assert any(tuple(words[i:i + len(PHRASE)]) == PHRASE for i in range(len(words)))


def test_replay_rejects_bad_logs():
    inp = GenInput(PAIR, "leather", PHRASE)
    res = generate(inp, MockPredictor(), PromptCopyLM(MockLM()), HashedEmbeddings())
    with pytest.raises(DecodeError):
        replay(inp, res.steps[:-1])
    with pytest.raises(DecodeError):
        replay(inp, list(res.steps) + [res.steps[-1]])
