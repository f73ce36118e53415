import json

import pytest

from pungen.backends.lexical import MockWSD, StaticReverseDictionary
from pungen.backends.mock import MockLM
from pungen.corpus import Corpus, Phrase, extract_phrase
from pungen.homographic import (
    ConversionError, NoSubstituteError, SensePair, SubstitutePair, choose_substitutes, convert, disambiguate_phrases,
    reverse_lookup,
)

D1 = "a set of words that is complete in itself, typically containing a subject and predicate"
D2 = "the punishment assigned to a defendant found guilty by a court"
SENSE = SensePair("sentence", D1, D2)


def test_sense_pair_validation_and_roundtrip():
    assert SensePair.from_dict(SENSE.to_dict()) == SENSE
    assert SENSE.swapped().sense_1 == D2
    with pytest.raises(ValueError):
        SensePair("sentence", D1, " " + D1.upper())
    with pytest.raises(ValueError):
        SensePair("two words", D1, D2)
    with pytest.raises(ValueError):
        SubstitutePair("clause", "Clause")


def test_reverse_lookup_filters_surface_and_multiword():
    rd = StaticReverseDictionary({D1: ["sentence", "noun phrase", "clause", "phrase"]})
    assert [w for w, _ in reverse_lookup(D1, rd, k=2, surface="sentence")] == ["clause", "phrase"]
    with pytest.raises(NoSubstituteError):
        reverse_lookup("x", StaticReverseDictionary({"x": ["sentence"]}), surface="sentence")
    with pytest.raises(ValueError):
        reverse_lookup("  ", rd)


def test_choose_substitutes(fixtures_dir):
    rd = StaticReverseDictionary(json.loads((fixtures_dir / "sentence_reverse_dictionary.json").read_text()))
    subs = choose_substitutes(SENSE, rd)
    assert (subs.sub_pw, subs.sub_aw) == ("clause", "conviction")


def test_choose_substitutes_avoids_collisions():
    rd = StaticReverseDictionary({D1: ["clause"], D2: ["clause", "penalty"]})
    assert choose_substitutes(SENSE, rd).sub_aw == "penalty"
    with pytest.raises(ConversionError):
        choose_substitutes(SENSE, StaticReverseDictionary({D1: ["clause"], D2: ["clause"]}))
    with pytest.raises(ConversionError):
        choose_substitutes(SENSE, StaticReverseDictionary({D1: ["sentence"], D2: ["penalty"]}))


def test_disambiguation_tags_with_margin():
    a = Phrase(("a", "sentence"), 1)
    b = Phrase(("the", "sentence"), 1)
    c = Phrase(("one", "sentence"), 1)
    wsd = MockWSD({"a sentence": [0.9, 0.1], "the sentence": [0.2, 0.8], "one sentence": [0.51, 0.49]})
    tags = [t for _, t in disambiguate_phrases([a, b, c], SENSE, wsd, margin=0.05)]
    assert tags == ["sense_1", "sense_2", "unknown"]


def _mock_wsd(corpus):
    # sentences mentioning court vocabulary get sense 2
    legal = {"judge", "court", "prison", "fraud", "trial", "jury", "convicted"}
    fixed = {}
    for i in corpus.sentences_containing("sentence"):
        s = corpus.sentences[i]
        ph = extract_phrase(s, "sentence", 3)
        is_legal = bool(legal & {t.lower() for t in s})
        fixed[" ".join(ph.tokens)] = [0.1, 0.9] if is_legal else [0.9, 0.1]
    return fixed


def test_convert_with_mocks(fixtures_dir):
    corpus = Corpus.ingest_paths([fixtures_dir / "sentence_corpus.txt"])
    rd = StaticReverseDictionary(json.loads((fixtures_dir / "sentence_reverse_dictionary.json").read_text()))
    conv = convert(SENSE, corpus, MockLM(), rd, MockWSD(_mock_wsd(corpus)))
    assert conv.banned == ("clause", "conviction")
    assert conv.pair.pw == conv.pair.aw == "sentence"
    assert conv.pair.substitutes == ("clause", "conviction")
    assert conv.phrase.phrase.anchor == "sentence"
    tags = dict(conv.tags)
    assert tags[conv.phrase.source.source_sentence_id] == "sense_2"
    assert conv.context.word not in {"sentence", "clause", "conviction"}
    inp = conv.gen_input(max_length=20)
    assert inp.phrase == conv.phrase.phrase.tokens
    assert json.dumps(conv.to_dict())


def test_convert_needs_both_senses(fixtures_dir):
    corpus = Corpus.ingest_paths([fixtures_dir / "sentence_corpus.txt"])
    rd = StaticReverseDictionary(json.loads((fixtures_dir / "sentence_reverse_dictionary.json").read_text()))
    with pytest.raises(ConversionError):
        convert(SENSE, corpus, MockLM(), rd, MockWSD())  # uniform scores: every phrase is unknown
