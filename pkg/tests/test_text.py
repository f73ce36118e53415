from hypothesis import given, strategies as st

from pungen.text import STOPWORDS, detokenize, phrase_progress, split_sentences, tokenize


def test_stopword_list_is_the_fixed_179_word_list():
    assert len(STOPWORDS) == 179
    assert {"the", "of", "and", "a"} <= STOPWORDS


def test_tokenize_keeps_internal_apostrophes_and_hyphens():
    assert tokenize("It's a two-page note, isn't it?") == ["It's", "a", "two-page", "note", ",", "isn't", "it", "?"]


def test_tokenize_keeps_abbreviation_periods():
    assert tokenize("Dr. Smith met the U.S. envoy.") == ["Dr.", "Smith", "met", "the", "U.S.", "envoy", "."]


def test_two_sentences():
    assert split_sentences("I ran. She sat.") == ["I ran.", "She sat."]


def test_abbreviation_guard():
    assert split_sentences("Dr. Smith ran.") == ["Dr. Smith ran."]


def test_initials_do_not_split():
    assert split_sentences("J. R. Tolkien wrote books. They sold well.") == ["J. R. Tolkien wrote books.", "They sold well."]


def test_line_per_sentence_detected():
    text = "the first line\nthe second line\nthe third line\n"
    assert split_sentences(text) == ["the first line", "the second line", "the third line"]


def test_blank_lines_are_boundaries():
    assert split_sentences("A title\n\nThe body text runs on. It ends here.") == [
        "A title", "The body text runs on.", "It ends here."]


def test_detokenize():
    assert detokenize(["Hello", ",", "world", "!"]) == "Hello, world!"


def test_phrase_progress():
    ph = ["were", "soled", "at", "the", "store"]
    assert phrase_progress(["the", "shoes", "were"], ph) == 1
    assert phrase_progress(["shoes", "Were", "SOLED"], ph) == 2
    assert phrase_progress(["were", "soled", "at", "the", "store", "today"], ph) == 5
    assert phrase_progress(["at", "the"], ph) == 0


@given(st.lists(st.sampled_from(["a", "b", "c", ",", "."]), max_size=12))
def test_phrase_progress_bounds(gen):
    ph = ["a", "b", "c"]
    k = phrase_progress(gen, ph)
    assert 0 <= k <= 3
    words = [t for t in gen if t not in {",", "."}]
    if 0 < k < 3:
        assert words[-k:] == ph[:k]
