"""Lyrics tokenization and the song-specific high-order n-gram model."""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import EmptyLyrics, UnknownWord
from .lexicon import NOISE, normalize_word

BOS = "<s>"
EOS = "</s>"
DEFAULT_ORDER = 20
DEFAULT_BACKOFF = math.log(1e-4)

_SPLIT = re.compile(r"[\s\-‐-―/]+")


@dataclass(frozen=True)
class FlatWord:
    token: str
    line_index: int
    word_index: int


@dataclass
class LyricsDocument:
    """Tokenized lyrics; ``lines`` hold the NOISE-tagged token streams."""

    lines: list
    flat_words: list

    @property
    def words(self) -> list[str]:
        return [fw.token for fw in self.flat_words]

    def vocabulary(self) -> set[str]:
        return {tok for line in self.lines for tok in line}

    def __len__(self):
        return len(self.flat_words)


def tokenize_lyrics(text) -> LyricsDocument:
    if hasattr(text, "read"):
        text = text.read()
    lines, flat = [], []
    for raw in text.splitlines():
        tokens = [t for t in (normalize_word(p) for p in _SPLIT.split(raw)) if t]
        if not tokens:
            continue
        line_index = len(lines)
        for tok in tokens:
            flat.append(FlatWord(tok, line_index, len(flat)))
        lines.append([NOISE, *tokens, NOISE])
    if not flat:
        raise EmptyLyrics("no words survive normalization")
    return LyricsDocument(lines, flat)


def document_from_lines(lines) -> LyricsDocument:
    """Build a document from pre-normalized token lists without adding NOISE tags."""
    flat = []
    for li, line in enumerate(lines):
        for tok in line:
            if tok != NOISE:
                flat.append(FlatWord(tok, li, len(flat)))
    return LyricsDocument([list(line) for line in lines], flat)


@dataclass
class NGramModel:
    """Maximum-likelihood n-gram counts with a fixed per-order backoff penalty.

    ``counts`` maps a history tuple (length ``0 .. order-1``) to a Counter of
    continuations. Histories may start with the sentence-begin marker and
    continuations of non-empty histories may be the sentence-end marker; the
    unigram table (empty history) holds real tokens only.
    """

    order: int
    counts: dict
    backoff_penalty: float = DEFAULT_BACKOFF
    totals: dict = field(default_factory=dict)
    vocabulary: frozenset = frozenset()

    def __post_init__(self):
        if not self.totals:
            self.totals = {h: sum(c.values()) for h, c in self.counts.items()}
        if not self.vocabulary:
            self.vocabulary = frozenset(self.counts.get((), ()))

    def prob(self, history, word) -> float:
        return self.counts[tuple(history)][word] / self.totals[tuple(history)]

    def state(self, history) -> tuple:
        """Longest suffix of ``history`` (at most order-1 tokens) that is a stored history."""
        h = tuple(history)[-(self.order - 1):] if self.order > 1 else ()
        while h and h not in self.counts:
            h = h[1:]
        return h


def build_ngram(doc: LyricsDocument, order: int = DEFAULT_ORDER, backoff_penalty: float = DEFAULT_BACKOFF) -> NGramModel:
    """Count every order 1..``order`` over each tagged line as an independent sentence."""
    if order < 1:
        raise ValueError("order must be >= 1")
    counts: dict = {}
    for line in doc.lines:
        seq = [BOS, *line, EOS]
        for i in range(1, len(seq)):
            word = seq[i]
            if word != EOS:
                counts.setdefault((), Counter())[word] += 1
            for k in range(1, order):
                if i - k < 0:
                    break
                counts.setdefault(tuple(seq[i - k:i]), Counter())[word] += 1
    return NGramModel(order, counts, backoff_penalty)


def _lookup(model: NGramModel, history, word):
    h = model.state(history)
    drops = 0
    while True:
        c = model.counts.get(h)
        if c is not None and word in c:
            return drops * model.backoff_penalty + math.log(c[word] / model.totals[h])
        if not h:
            return None
        # every suffix of a stored history is itself stored
        h = h[1:]
        drops += 1


def log_prob(model: NGramModel, history, word) -> float:
    """Natural-log probability of ``word`` after ``history``.

    The longest stored history suffix that has seen ``word`` answers; each
    drop to a shorter stored history costs ``backoff_penalty``. A word seen
    at no order scores the penalty alone.
    """
    if word not in model.vocabulary and word != EOS:
        raise UnknownWord(f"{word!r} is not in the lyrics vocabulary")
    lp = _lookup(model, history, word)
    return model.backoff_penalty if lp is None else lp


def log_prob_vector(model: NGramModel, history, words) -> list[float]:
    """``[log_prob(model, history, w) for w in words]`` computed in one pass over the suffix chain."""
    h = model.state(history)
    chain = [h[i:] for i in range(len(h) + 1)]  # longest first, ends with ()
    index = {w: i for i, w in enumerate(words)}
    out = [model.backoff_penalty] * len(words)
    # shortest suffix first so longer histories overwrite
    for drops in range(len(chain) - 1, -1, -1):
        hist = chain[drops]
        c = model.counts.get(hist)
        if not c:
            continue
        total = model.totals[hist]
        for w, n in c.items():
            i = index.get(w)
            if i is not None:
                out[i] = drops * model.backoff_penalty + math.log(n / total)
    return out


def has_continuation(model: NGramModel, history, word) -> bool:
    return _lookup(model, history, word) is not None
