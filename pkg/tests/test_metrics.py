import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pungen.backends.mock import MockLM
from pungen.embeddings import EmbeddingTable
from pungen.metrics import (
    UndefinedMetricError, ambiguity, ambiguity_from_posterior, binary_entropy, distinctiveness, evaluate_corpus,
    meaning_posterior, MeaningPosterior, report_csv, surprisal_parts, surprisal_ratio, surprisal_ratio_from_parts,
)
from pungen.types import PunPair

PAIR = PunPair("soled", "sold")
NAMES = ["leather", "boots", "store", "price", "shoes", "cash", "market", "heel"]


def _emb(rng):
    return EmbeddingTable(["soled", "sold"] + NAMES, rng.standard_normal((2 + len(NAMES), 4)))


@given(st.integers(0, 10**6), st.lists(st.sampled_from(NAMES), min_size=1, max_size=8))
def test_posterior_normalized_and_swap_antisymmetric(seed, words):
    emb = _emb(np.random.default_rng(seed))
    post = meaning_posterior(words, PAIR, emb)
    assert abs(post.p_m1 + post.p_m2 - 1.0) <= 1e-9
    d1, d2 = distinctiveness(words, PAIR, emb)
    e1, e2 = distinctiveness(words, PAIR.swapped(), emb)
    assert (e1, e2) == (d2, d1)
    assert ambiguity(words, PAIR, emb) == pytest.approx(ambiguity(words, PAIR.swapped(), emb), abs=1e-9)
    assert 0.0 <= ambiguity(words, PAIR, emb) <= 100.0


def test_equidistant_words_give_even_posterior():
    emb = EmbeddingTable(["soled", "sold", "shoes"], np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
    post = meaning_posterior("the shoes", PAIR, emb)
    assert post.p_m1 == pytest.approx(0.5) and ambiguity("the shoes", PAIR, emb) == pytest.approx(100.0)
    assert distinctiveness("the shoes", PAIR, emb) == (0.0, 0.0)


def test_more_pun_word_support_raises_p1():
    emb = EmbeddingTable(["soled", "sold", "heel", "cash"], np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.1], [0.1, 1.0]]))
    a = meaning_posterior("heel cash", PAIR, emb).p_m1
    b = meaning_posterior("heel heel cash", PAIR, emb).p_m1
    assert b > a > 0.5 - 1e-12


def test_entropy_closed_forms():
    assert ambiguity_from_posterior(MeaningPosterior(0.5, 0.5)) == pytest.approx(100.0)
    assert ambiguity_from_posterior(MeaningPosterior(1.0, 0.0)) == 0.0
    assert ambiguity_from_posterior(MeaningPosterior(0.9, 0.1)) == pytest.approx(46.9, abs=0.05)


@given(st.floats(0.0, 1.0))
def test_entropy_peaks_at_half(p):
    assert binary_entropy(p) <= binary_entropy(0.5) + 1e-12


def test_undefined_posterior():
    emb = EmbeddingTable(["soled", "sold"], np.eye(2))
    with pytest.raises(UndefinedMetricError):
        meaning_posterior("the soled", PAIR, emb)
    with pytest.raises(UndefinedMetricError):
        meaning_posterior("the cat", PunPair("zebra", "sold"), emb)


def test_surprisal_ratio_closed_forms():
    assert surprisal_ratio_from_parts(2.0, 2.0) == 0.0
    assert surprisal_ratio_from_parts(2.0, 0.0) == 1.0
    assert surprisal_ratio_from_parts(-1.0, 2.0, eps=0.0) == -2.0
    assert surprisal_ratio_from_parts(0.0, 0.0) == 0.0


def test_surprisal_requires_pun_word():
    with pytest.raises(UndefinedMetricError):
        surprisal_ratio("no pun here", PAIR, MockLM())


def test_appending_after_window_changes_only_global():
    lm = MockLM()
    base = "the shoes were soled at the store"
    l1, g1 = surprisal_parts(base, PAIR, lm, local_window=2)
    l2, g2 = surprisal_parts(base + " at half price", PAIR, lm, local_window=2)
    assert l1 == l2
    assert g1 != g2


def test_shoe_sentence_surprisal_parts_are_finite(wordnet_lm):
    s = "The leather boots he was wearing were heavily abraded, and were soled at the store at half price."
    d_local, d_global = surprisal_parts(s, PAIR, wordnet_lm)
    # the pun word is the less expected one in its immediate neighborhood
    assert d_local > 0
    assert math.isfinite(d_global)


def test_evaluate_corpus_and_csv():
    emb = EmbeddingTable(["soled", "sold", "shoes", "cash"], np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.2], [0.2, 1.0]]))
    recs = [("the shoes were soled", PAIR, "human"), ("cash soled", PAIR, "human"), ("soled", PAIR, "ours")]
    rows = evaluate_corpus(recs, emb, MockLM())
    assert [r["system"] for r in rows] == ["human", "ours"]
    assert rows[0]["n"] == 2 and rows[0]["excluded_A"] == 0
    assert rows[1]["excluded_A"] == 1 and math.isnan(rows[1]["A"])
    text = report_csv(rows, header="cfg abc")
    assert text.startswith("# cfg abc\nsystem,n,A,")
    with pytest.raises(ValueError):
        evaluate_corpus([], emb, None)
