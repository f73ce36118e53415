import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pungen.backends.base import MalformedQueryError
from pungen.backends.ngram import KneserNeyTrigram, NgramTopicLM
from pungen.embeddings import HashedEmbeddings

TOY = [s.split() for s in (
    "the cat sat on the mat", "the dog sat on the rug", "a cat ate the fish",
    "the dog ate a bone", "a bird sat on a branch", "the cat saw the bird",
)] * 3


@pytest.fixture(scope="module")
def toy_kn():
    return KneserNeyTrigram.fit(TOY, min_count=1)


@given(st.lists(st.sampled_from(["the", "cat", "sat", "on", "zebra", "a"]), max_size=3))
def test_trigram_distribution_is_normalized(context):
    kn = KneserNeyTrigram.fit(TOY, min_count=1)
    lp = kn.next_logprobs(context)
    assert np.exp(lp).sum() == pytest.approx(1.0, abs=1e-9)


def test_trigram_prefers_seen_continuation(toy_kn):
    assert toy_kn.logprob(["sat", "on"], "the") > toy_kn.logprob(["sat", "on"], "fish")


def test_save_load_roundtrip(toy_kn, tmp_path):
    toy_kn.save(tmp_path / "kn.npz")
    kn = KneserNeyTrigram.load(tmp_path / "kn.npz")
    assert kn.vocab == toy_kn.vocab
    np.testing.assert_array_equal(kn.next_logprobs(["the"]), toy_kn.next_logprobs(["the"]))


@pytest.fixture(scope="module")
def toy_lm(toy_kn):
    return NgramTopicLM(toy_kn, HashedEmbeddings(dim=16))


@given(st.lists(st.sampled_from(["the", "cat", "sat", "on", "zebra"]), max_size=4))
@settings(deadline=None)
def test_mixture_is_normalized(context):
    kn = KneserNeyTrigram.fit(TOY, min_count=1)
    lm = NgramTopicLM(kn, HashedEmbeddings(dim=16))
    assert np.exp(lm.next_logprobs(context)).sum() == pytest.approx(1.0, abs=1e-9)


def test_candidates_sorted_words(toy_lm):
    c = toy_lm.next_word_candidates(["the"], 5)
    assert len(c) == 5
    assert all(a.logprob >= b.logprob for a, b in zip(c, c[1:]))
    assert "<unk>" not in [x.word for x in c]


def test_surprisal_nonnegative_and_oov_finite(toy_lm):
    for ctx, w in (([], "cat"), (["the"], "zebra"), (["x", "y"], "mat")):
        s = toy_lm.word_surprisal(ctx, w)
        assert math.isfinite(s) and s >= 0


def test_mask_fill_errors_and_determinism(toy_lm):
    with pytest.raises(MalformedQueryError):
        toy_lm.mask_fill_logprobs(["the", "cat"], ["dog"])
    t = ["the", "<mask>", "sat", "on", "the", "mat"]
    a = toy_lm.mask_fill_logprobs(t, ["cat", "dog", "zebra"])
    assert np.array_equal(a, toy_lm.mask_fill_logprobs(t, ["cat", "dog", "zebra"]))
    assert a[0] > a[2] and a[1] > a[2]
    assert np.all(a <= 0)


def test_real_backend_is_normalized(wordnet_lm):
    for ctx in ([], ["the"], "the shoes were".split()):
        assert np.exp(wordnet_lm.next_logprobs(ctx)).sum() == pytest.approx(1.0, abs=1e-9)


def test_real_backend_sold_less_surprising_than_soled(wordnet_lm):
    # local window of the shoe example: were ___ at the store at half price
    assert wordnet_lm.word_surprisal(["were"], "sold") < wordnet_lm.word_surprisal(["were"], "soled")
    sold = wordnet_lm.sequence_surprisal("were sold at the store at half price".split())
    soled = wordnet_lm.sequence_surprisal("were soled at the store at half price".split())
    assert sold < soled
