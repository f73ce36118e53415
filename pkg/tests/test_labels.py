import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pungen.embeddings import EmbeddingTable, OOVError
from pungen.labels import (
    build_predictor_dataset, confident_subset, curate_classifier_dataset, gap_label, grid_search_threshold,
    label_fractions, label_sentence, macro_f1, per_category_f1, read_examples, similarity_gap, unsupervised_label,
    write_examples,
)
from pungen.types import LabeledExample, PunPair

PAIR = PunPair("pw", "aw")
NAMES = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet", "kilo", "lima"]


def w(i):
    return NAMES[i]


def _angle_for_gap(g):
    # with pw = (1, 0) and aw = (0, 1), a unit vector at angle t has gap cos t - sin t
    return math.acos(g / math.sqrt(2)) - math.pi / 4


def _table(gaps):
    words = ["pw", "aw"] + NAMES[: len(gaps)]
    vecs = [[1.0, 0.0], [0.0, 1.0]] + [[math.cos(_angle_for_gap(g)), math.sin(_angle_for_gap(g))] for g in gaps]
    return EmbeddingTable(words, np.array(vecs))


def test_gap_values_and_labels():
    emb = _table([0.5, -0.3, 0.0])
    assert similarity_gap("alpha", PAIR, emb) == pytest.approx(0.5, abs=1e-6)
    assert similarity_gap("pw", PAIR, emb) == pytest.approx(1.0)
    assert unsupervised_label("alpha", PAIR, emb) == "D1"
    assert unsupervised_label("bravo", PAIR, emb) == "D2"
    assert unsupervised_label("charlie", PAIR, emb) == "A"
    assert unsupervised_label("the", PAIR, emb) == "A"
    assert unsupervised_label("unseen", PAIR, emb) == "A"
    with pytest.raises(OOVError):
        similarity_gap("unseen", PAIR, emb)


def test_hair_leans_to_mane(wordnet_vectors):
    assert similarity_gap("hair", PunPair("mane", "main"), wordnet_vectors) > 0.15
    assert unsupervised_label("hair", PunPair("mane", "main"), wordnet_vectors) == "D1"


@given(st.floats(-1.0, 1.0), st.floats(0.01, 0.5))
def test_gap_label_threshold(g, t):
    lab = gap_label(g, t)
    assert (lab == "A") == (abs(g) <= t)
    assert gap_label(-g, t) == {"A": "A", "D1": "D2", "D2": "D1"}[lab]


def test_grid_search_recovers_planted_optimum():
    gaps = [0.22, 0.3, 0.5, -0.25, 0.18, 0.12, 0.05, -0.19]
    gold = ["D1", "D1", "D1", "D2", "A", "A", "A", "A"]
    emb = _table(gaps)
    annotated = [LabeledExample((), w(i), PAIR, lab, "human") for i, lab in enumerate(gold)]
    assert grid_search_threshold(annotated, emb, [0.1, 0.15, 0.2, 0.25, 0.3]) == 0.2


def test_grid_search_errors():
    emb = _table([0.5])
    with pytest.raises(ValueError):
        grid_search_threshold([LabeledExample((), "alpha", PAIR, "D1")], emb, [0.1])
    with pytest.raises(ValueError):
        grid_search_threshold([LabeledExample((), "alpha", PAIR, "D1"), LabeledExample((), "pw", PAIR, "A")], emb, [])


def test_curation_excludes_the_band():
    gaps = [0.05, 0.14, 0.15, 0.2, 0.22, 0.23, -0.2, -0.3]
    emb = _table(gaps)
    sentence = NAMES[: len(gaps)] + ["the", "."]
    data = curate_classifier_dataset([(sentence, PAIR)], emb, t=0.15)
    got = {ex.tw: ex.label for ex in data}
    assert got == {"alpha": "A", "bravo": "A", "foxtrot": "D1", "hotel": "D2", "the": "A"}
    assert all(ex.prefix == tuple(sentence[: sentence.index(ex.tw)]) for ex in data)


@given(st.integers(0, 10**6))
def test_curation_and_gap_properties_on_random_tables(seed):
    rng = np.random.default_rng(seed)
    words = ["pw", "aw"] + NAMES
    emb = EmbeddingTable(words, rng.standard_normal((len(words), 5)))
    pair = PunPair("pw", "aw")
    for w in words[2:]:
        assert similarity_gap(w, pair.swapped(), emb) == pytest.approx(-similarity_gap(w, pair, emb), abs=1e-6)
    data = curate_classifier_dataset([(words[2:], pair)], emb, t=0.15)
    for ex in data:
        assert not (0.15 <= abs(ex.gap) <= 1.5 * 0.15)


def test_predictor_dataset_merge():
    auto = [LabeledExample(("a",), "x", PAIR, "D1"), LabeledExample(("a",), "y", PAIR, "A"),
            LabeledExample(("b",), "z", PAIR, "D2")]
    human = [LabeledExample(("b",), "z", PAIR, "A", "human")]
    out = build_predictor_dataset(lambda prefix, tw, pair: "D1", auto, human)
    assert [(ex.tw, ex.label, ex.source) for ex in out] == [("x", "D1", "classifier"), ("z", "A", "human")]
    with pytest.raises(ValueError):
        build_predictor_dataset(lambda *a: "A", auto, [LabeledExample((), "q", PAIR, "A")])


def test_f1_scores():
    gold = ["A", "A", "D1", "D2"]
    pred = ["A", "D1", "D1", "A"]
    f1 = per_category_f1(gold, pred)
    assert f1 == {"A": pytest.approx(0.5), "D1": pytest.approx(2 / 3), "D2": 0.0}
    assert macro_f1(gold, pred) == pytest.approx((0.5 + 2 / 3) / 3)
    assert macro_f1(["A"], ["A"]) == 1.0


@given(st.lists(st.floats(0, 1), min_size=1, max_size=60))
def test_confident_subset_drops_lowest(conf):
    keep = confident_subset(conf)
    assert len(keep) == len(conf) - int(math.floor(0.1 * len(conf)))
    dropped = set(range(len(conf))) - set(keep.tolist())
    if dropped:
        assert max(conf[i] for i in dropped) <= min(conf[i] for i in keep)
    assert all(conf[i] > 0.5 for i in confident_subset(conf, threshold=0.5))


def test_sentence_labels_and_fractions():
    emb = _table([0.5, -0.5])
    labs = label_sentence("the alpha met bravo .", PAIR, lambda prefix, tw, pair: unsupervised_label(tw, pair, emb))
    assert labs == [("the", "A"), ("alpha", "D1"), ("met", "A"), ("bravo", "D2")]
    assert label_fractions(lab for _, lab in labs) == {"A": 0.5, "D1": 0.25, "D2": 0.25}


def test_examples_roundtrip(tmp_path):
    ex = [LabeledExample(("a", "b"), "c", PunPair("pw", "aw"), "D2", gap=-0.3)]
    write_examples(tmp_path / "e.jsonl", ex)
    assert read_examples(tmp_path / "e.jsonl") == ex
    assert read_examples(tmp_path / "e.jsonl", source="human")[0].source == "human"
