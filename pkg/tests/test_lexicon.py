import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lyricanchor.errors import MissingPronunciation, ParseError
from lyricanchor.lexicon import (
    NOISE, NSE, PHONES, SIL, G2pRules, default_g2p_rules, extend_for_lyrics, g2p_fallback, load_g2p_rules,
    load_lexicon, normalize_word,
)
from lyricanchor.lm import tokenize_lyrics

LETTERS = {c: c.upper() for c in "abcdefghijklmnopqrstuvwxyz"}


def rules_with(**extra):
    pairs = dict(LETTERS)
    pairs.update(extra)
    return G2pRules.from_pairs(pairs.items())


def test_single_entry():
    lex = load_lexicon("HELLO HH AH L OW\n")
    assert lex.pronunciations("hello") == [("HH", "AH", "L", "OW")]


def test_duplicate_lines_are_alternatives():
    lex = load_lexicon("THE DH AH0\nTHE DH IY0\n")
    assert lex.pronunciations("THE") == [("DH", "AH"), ("DH", "IY")]


def test_cmudict_variant_markers_and_comments():
    lex = load_lexicon(";;; header\n# note\nREAD R IY1 D\nREAD(2) R EH1 D\n\n")
    assert lex.pronunciations("read") == [("R", "IY", "D"), ("R", "EH", "D")]


def test_missing_phonemes_reports_line():
    with pytest.raises(ParseError) as err:
        load_lexicon("A AH\n\nHELLO\n")
    assert err.value.line == 3


def test_unknown_word_lookup():
    with pytest.raises(MissingPronunciation):
        load_lexicon("A AH\n").pronunciations("B")


@pytest.mark.parametrize("raw, norm", [
    ("Hello,", "HELLO"), ("don't", "DON'T"), ("'cause", "CAUSE"), ("(la)", "LA"), ("...", ""), ("rock'n'roll!", "ROCK'N'ROLL"),
])
def test_normalize(raw, norm):
    assert normalize_word(raw) == norm


def test_g2p_single_letters():
    assert g2p_fallback("LA", rules_with(l="L", a="AA")) == ("L", "AA")


def test_g2p_longest_match():
    r = rules_with(oo="UW", o="OW", h="HH")
    assert g2p_fallback("OOOH", r) == ("UW", "OW", "HH")


def test_g2p_repetition_across_letters_kept():
    assert g2p_fallback("NANANA", rules_with(n="N", a="AA")) == ("N", "AA") * 3


def test_g2p_collapses_adjacent_duplicates():
    assert g2p_fallback("BOOK", rules_with(b="B", o="UH", k="K")) == ("B", "UH", "K")


def test_g2p_unmappable_word_still_gets_a_pronunciation():
    assert g2p_fallback("'", default_g2p_rules()) == ("AH",)


def test_rules_must_cover_alphabet():
    with pytest.raises(ValueError):
        G2pRules.from_pairs([("a", "AA")])


def test_rules_may_not_emit_reserved_phones():
    with pytest.raises(ValueError):
        rules_with(x="SIL")


def test_rules_file_format():
    text = "# comment\n" + "".join(f"{c}\t{p}\n" for c, p in LETTERS.items()) + "tion\tSH AH N\n"
    r = load_g2p_rules(text)
    assert r.rules["tion"] == ("SH", "AH", "N")
    with pytest.raises(ParseError):
        load_g2p_rules("a AA\n")


def test_default_rules_emit_known_phones():
    r = default_g2p_rules()
    assert {p for phones in r.rules.values() for p in phones} <= set(PHONES) - {SIL, NSE}


def test_extend_all_known():
    lex = load_lexicon("LA L AA\nLAND L AE N D\n")
    out = extend_for_lyrics(lex, tokenize_lyrics("la la land"), default_g2p_rules())
    assert set(out.entries) == {"LA", "LAND", NOISE}
    assert out.entries[NOISE] == [(NSE,)]
    assert out.entries["LA"] == lex.entries["LA"]


def test_extend_adds_oov_once():
    lex = load_lexicon("LA L AA\n")
    out = extend_for_lyrics(lex, tokenize_lyrics("oooh " * 5 + "la"), default_g2p_rules())
    assert len(out.entries["OOOH"]) == 1
    assert out.provenance["OOOH"] == "g2p"
    assert out.provenance["LA"] == "dictionary"
    assert "OOOH" not in lex


def test_lexicon_text_roundtrip():
    lex = load_lexicon("B B IY\nA AH\nA EY\n")
    assert load_lexicon(lex.to_text()).entries == lex.entries


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz'0123456789", min_size=1, max_size=12))
def test_g2p_total_and_clean(word):
    phones = g2p_fallback(word, default_g2p_rules())
    assert phones
    assert not {SIL, NSE} & set(phones)
    assert all(a != b for a, b in zip(phones, phones[1:]))
    assert phones == g2p_fallback(word, default_g2p_rules())


@settings(max_examples=100, deadline=None)
@given(st.lists(st.text(alphabet="abcdefgh' -", min_size=1, max_size=8), min_size=1, max_size=6))
def test_extension_closes_vocabulary(lines):
    text = "\n".join(lines) + "\nla"
    doc = tokenize_lyrics(text)
    out = extend_for_lyrics(load_lexicon("LA L AA\n"), doc, default_g2p_rules())
    for line in doc.lines:
        for tok in line:
            assert out.pronunciations(tok)
