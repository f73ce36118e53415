import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pungen.embeddings import EmbeddingTable, HashedEmbeddings, OOVError, centered, fingerprint, train_skipgram


def _table():
    return EmbeddingTable(["Cat", "dog", "car"], np.array([[1.0, 0.0], [0.8, 0.6], [0.0, 2.0]]))


def test_lookup_is_case_folded_and_oov_raises():
    t = _table()
    assert "cat" in t and "CAT" in t and "cow" not in t
    assert t.cosine("cat", "DOG") == pytest.approx(0.8)
    with pytest.raises(OOVError):
        t.unit("cow")


def test_cosines_to_gives_zero_for_oov():
    np.testing.assert_allclose(_table().cosines_to(["car", "cow"], "car"), [1.0, 0.0])


def test_nearest_excludes_words():
    t = _table()
    assert [w for w, _ in t.nearest(t.unit("cat"), k=2, exclude=["cat"])] == ["dog", "car"]


def test_rejects_duplicates_and_bad_shapes():
    with pytest.raises(ValueError):
        EmbeddingTable(["a", "A"], np.eye(2))
    with pytest.raises(ValueError):
        EmbeddingTable(["a"], np.eye(2))


def test_npz_and_glove_roundtrip(tmp_path):
    t = _table()
    t.save(tmp_path / "v.npz")
    u = EmbeddingTable.load(tmp_path / "v.npz")
    assert u.words == t.words and np.array_equal(u.vectors, t.vectors)
    (tmp_path / "g.txt").write_text("the 1 0 0\nThe 9 9 9\nbad\nsun 0 1 0\n")
    g = EmbeddingTable.load(tmp_path / "g.txt")
    assert g.words == ["the", "sun"] and g.dim == 3
    assert fingerprint(u) == fingerprint(t) != fingerprint(g)


@given(st.text(min_size=1, max_size=12), st.text(min_size=1, max_size=12))
def test_hashed_cosine_symmetric_bounded(a, b):
    h = HashedEmbeddings(dim=16)
    c = h.cosine(a, b)
    assert c == pytest.approx(h.cosine(b, a))
    assert -1.0 - 1e-6 <= c <= 1.0 + 1e-6
    assert h.cosine(a, a) == pytest.approx(1.0, abs=1e-6)


def test_centering_removes_mean():
    c = centered(_table())
    np.testing.assert_allclose(c.vectors.mean(axis=0), 0.0, atol=1e-6)


@settings(deadline=None, max_examples=1)
@given(st.just(0))
def test_skipgram_separates_topics(_):
    rng = np.random.default_rng(0)
    animals = ["cat", "dog", "horse", "cow", "sheep"]
    vehicles = ["car", "bus", "truck", "train", "van"]
    sents = [list(rng.choice(group, 6)) for _ in range(600) for group in (animals, vehicles)]
    t = train_skipgram(sents, dim=16, window=3, epochs=3, min_count=1, sample=0, seed=1)
    within = np.mean([t.cosine(a, b) for a in animals for b in animals if a != b])
    across = np.mean([t.cosine(a, b) for a in animals for b in vehicles])
    assert within > across + 0.2


def test_skipgram_is_deterministic():
    sents = [["a", "b", "c", "d"]] * 50 + [["d", "c", "e"]] * 50
    t1 = train_skipgram(sents, dim=8, epochs=2, min_count=1, seed=3)
    t2 = train_skipgram(sents, dim=8, epochs=2, min_count=1, seed=3)
    assert np.array_equal(t1.vectors, t2.vectors)


def test_skipgram_empty_vocabulary():
    with pytest.raises(ValueError):
        train_skipgram([["a", "b"]], min_count=5)
