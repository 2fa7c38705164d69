import math

import pytest

from lyricanchor.errors import EmptyLyrics, UnknownWord
from lyricanchor.lexicon import NOISE
from lyricanchor.lm import (
    BOS, EOS, FlatWord, build_ngram, document_from_lines, has_continuation, log_prob, log_prob_vector,
    tokenize_lyrics,
)

PEN = math.log(1e-4)


def test_tokenize_single_line():
    doc = tokenize_lyrics("la la land")
    assert doc.lines == [[NOISE, "LA", "LA", "LAND", NOISE]]
    assert doc.flat_words == [FlatWord("LA", 0, 0), FlatWord("LA", 0, 1), FlatWord("LAND", 0, 2)]


def test_tokenize_two_lines():
    doc = tokenize_lyrics("a b\n\nc\n")
    assert sum(line.count(NOISE) for line in doc.lines) == 4
    assert len(doc.flat_words) == 3
    assert doc.flat_words[2] == FlatWord("C", 1, 2)


def test_tokenize_splits_hyphens_and_punctuation():
    assert tokenize_lyrics("Oh-oh, don't stop/go!").words == ["OH", "OH", "DON'T", "STOP", "GO"]


def test_punctuation_only():
    with pytest.raises(EmptyLyrics):
        tokenize_lyrics("... !!\n--\n")


def test_unique_continuation():
    m = build_ngram(document_from_lines([["A", "B"]]), order=2)
    assert m.prob(("A",), "B") == 1.0
    assert log_prob(m, ["A"], "B") == 0.0


def test_bigram_by_hand():
    m = build_ngram(tokenize_lyrics("la la land"), order=2)
    assert m.prob(("LA",), "LA") == 0.5
    assert m.prob(("LA",), "LAND") == 0.5


def test_unigram_counts_noise():
    m = build_ngram(tokenize_lyrics("la la land"), order=1)
    assert m.prob((), NOISE) == pytest.approx(2 / 5)
    assert m.prob((), "LA") == pytest.approx(2 / 5)
    assert set(m.counts) == {()}


def test_backoff_by_hand():
    m = build_ngram(document_from_lines([["A", "B"]]), order=2, backoff_penalty=PEN)
    assert log_prob(m, ["B"], "A") == pytest.approx(PEN + math.log(0.5))


def test_unknown_word():
    m = build_ngram(tokenize_lyrics("a b"), order=3)
    with pytest.raises(UnknownWord):
        log_prob(m, ["A"], "Z")


def test_sentence_markers():
    m = build_ngram(tokenize_lyrics("a b"), order=3)
    assert log_prob(m, [BOS], NOISE) == 0.0
    assert log_prob(m, ["B", NOISE], EOS) == 0.0
    assert BOS not in m.counts[()] and EOS not in m.counts[()]
    assert has_continuation(m, ["B", NOISE], EOS)
    assert not has_continuation(m, [BOS], EOS)


def test_lines_are_independent_sentences():
    m = build_ngram(tokenize_lyrics("a b\nc d"), order=3)
    # B NOISE is followed by the end marker, never by the next line's NOISE
    assert set(m.counts[("B", NOISE)]) == {EOS}


def test_state_is_longest_stored_suffix():
    m = build_ngram(tokenize_lyrics("a b c"), order=20)
    assert m.state(["Z", "Q", "B"]) == ("B",)
    assert m.state([BOS, NOISE, "A", "B"]) == (BOS, NOISE, "A", "B")
    assert m.state([]) == ()


def test_vector_matches_scalar():
    doc = tokenize_lyrics("a b a c\nb b c a\nc")
    m = build_ngram(doc, order=4)
    vocab = sorted(m.vocabulary) + [EOS]
    for hist in ([], [BOS], ["A"], ["B", "A"], [NOISE, "B", "B"], ["C", "C", "C"]):
        assert log_prob_vector(m, hist, vocab) == [log_prob(m, hist, w) for w in vocab]


def test_multi_order_drop():
    m = build_ngram(document_from_lines([["A", "B", "C"], ["D", "B"]]), order=3, backoff_penalty=PEN)
    # (D, B) is stored but never saw C; (B,) saw C once and the end marker once
    assert log_prob(m, ["D", "B"], "C") == pytest.approx(PEN + math.log(0.5))
    # a word seen only in unigrams pays one drop per stored order skipped
    assert log_prob(m, ["D", "B"], "A") == pytest.approx(2 * PEN + math.log(1 / 5))


def test_determinism():
    doc = tokenize_lyrics("x y z\ny z x")
    assert build_ngram(doc, 5).counts == build_ngram(doc, 5).counts
