"""Pronunciation dictionary, rule-based g2p fallback and lyric-driven extension."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import MissingPronunciation, ParseError

SIL = "SIL"
NSE = "NSE"
NOISE = "<NOISE>"
RESERVED_PHONES = frozenset({SIL, NSE})

# ARPAbet without stress marks, plus the two reserved units.
PHONES = (
    "AA AE AH AO AW AY B CH D DH EH ER EY F G HH IH IY JH K L M N NG "
    "OW OY P R S SH T TH UH UW V W Y Z ZH"
).split() + [SIL, NSE]

_EDGE_PUNCT = re.compile(r"^[^\w']+|[^\w']+$")
_INNER_PUNCT = re.compile(r"[^\w']")
_STRESS = re.compile(r"\d$")


def normalize_word(word: str) -> str:
    """Uppercase, drop punctuation, keep apostrophes only between word characters."""
    if word == NOISE:
        return word
    w = _EDGE_PUNCT.sub("", word)
    w = _INNER_PUNCT.sub("", w).replace("_", "")
    w = w.strip("'")
    return w.upper()


@dataclass
class Lexicon:
    entries: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def __contains__(self, word):
        return normalize_word(word) in self.entries

    def __len__(self):
        return len(self.entries)

    def pronunciations(self, word) -> list[tuple[str, ...]]:
        key = normalize_word(word)
        try:
            return self.entries[key]
        except KeyError:
            raise MissingPronunciation(f"no pronunciation for {key!r}") from None

    def add(self, word, phones, source="dictionary"):
        phones = tuple(phones)
        if not phones:
            raise ValueError(f"empty pronunciation for {word!r}")
        prons = self.entries.setdefault(word, [])
        if phones not in prons:
            prons.append(phones)
        self.provenance.setdefault(word, source)

    def copy(self) -> "Lexicon":
        return Lexicon({w: list(p) for w, p in self.entries.items()}, dict(self.provenance))

    def phones(self) -> set[str]:
        return {ph for prons in self.entries.values() for pron in prons for ph in pron}

    def to_text(self) -> str:
        lines = []
        for word in sorted(self.entries):
            for pron in self.entries[word]:
                lines.append(f"{word} {' '.join(pron)}")
        return "\n".join(lines) + "\n"


def load_lexicon(text) -> Lexicon:
    """Parse ``WORD PH1 PH2 ...`` lines; repeated words become alternative pronunciations.

    CMUdict-style stress digits and ``WORD(2)`` variant markers are stripped.
    """
    if hasattr(text, "read"):
        text = text.read()
    lex = Lexicon()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith(";;;"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ParseError("entry has no phonemes", line=lineno)
        word = normalize_word(re.sub(r"\(\d+\)$", "", parts[0]))
        if not word:
            raise ParseError(f"word {parts[0]!r} is empty after normalization", line=lineno)
        phones = [_STRESS.sub("", p).upper() for p in parts[1:]]
        lex.add(word, phones)
    return lex


@dataclass(frozen=True)
class G2pRules:
    rules: dict
    max_len: int

    @classmethod
    def from_pairs(cls, pairs) -> "G2pRules":
        rules = {}
        for cluster, phones in pairs:
            cluster = cluster.lower()
            phones = tuple(phones.split()) if isinstance(phones, str) else tuple(phones)
            if not cluster:
                raise ValueError("empty grapheme cluster")
            if RESERVED_PHONES & set(phones):
                raise ValueError(f"rule {cluster!r} emits a reserved phoneme")
            rules[cluster] = phones
        missing = [c for c in "abcdefghijklmnopqrstuvwxyz" if c not in rules]
        if missing:
            raise ValueError(f"g2p rules lack single-letter fallbacks for {''.join(missing)}")
        return cls(rules, max(len(c) for c in rules))


def load_g2p_rules(text) -> G2pRules:
    """Parse ``cluster<TAB>PH1 PH2 ...`` lines."""
    if hasattr(text, "read"):
        text = text.read()
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cluster, sep, phones = line.strip().partition("\t")
        if not sep or not phones.strip():
            raise ParseError("expected cluster<TAB>phonemes", line=lineno)
        pairs.append((cluster.strip(), phones))
    try:
        return G2pRules.from_pairs(pairs)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def default_g2p_rules() -> G2pRules:
    return load_g2p_rules(resources.files("lyricanchor.data").joinpath("g2p_en.tsv").read_text("utf-8"))


def g2p_fallback(word: str, rules: G2pRules) -> tuple[str, ...]:
    """Longest-match-first rewrite of ``word``; adjacent duplicate phonemes collapse.

    Characters with no rule (apostrophes, unknown scripts) are skipped; a word
    with no mappable character falls back to a single schwa so that every OOV
    word receives some pronunciation.
    """
    w = word.lower()
    if not w:
        raise ValueError("empty word")
    out: list[str] = []
    i = 0
    while i < len(w):
        for n in range(min(rules.max_len, len(w) - i), 0, -1):
            phones = rules.rules.get(w[i:i + n])
            if phones is not None:
                for ph in phones:
                    if not out or out[-1] != ph:
                        out.append(ph)
                i += n
                break
        else:
            i += 1
    return tuple(out) if out else ("AH",)


def extend_for_lyrics(lex: Lexicon, doc, rules: G2pRules) -> Lexicon:
    """Return a copy of ``lex`` covering every token of ``doc`` (plus NOISE)."""
    out = lex.copy()
    for word in doc.vocabulary():
        if word == NOISE or word in out.entries:
            continue
        out.add(word, g2p_fallback(word, rules), source="g2p")
    out.entries[NOISE] = [(NSE,)]
    out.provenance[NOISE] = "dictionary"
    return out
