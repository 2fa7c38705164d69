"""Search networks for biased transcription and forced alignment.

States either emit one phoneme per frame (with an implicit zero-weight
self-loop) or are non-emitting junctions. Arcs are ``(dest, weight, label)``
where ``label`` is an index into ``graph.labels`` marking a word end, or
``None``. The transcription network is expanded on demand: its states pair
an LM history with a position inside a pronunciation and are numbered in
order of first discovery, which is deterministic for a deterministic search.
"""
from __future__ import annotations

import math

from ..errors import MissingPronunciation
from ..lexicon import NSE, SIL, Lexicon
from ..lm import BOS, EOS, NGramModel, has_continuation, log_prob, log_prob_vector

TRANSCRIPTION = "transcription"
ALIGNMENT = "alignment"


class DecodeGraph:
    def __init__(self, mode):
        self.mode = mode
        self.phone: list = []      # phoneme symbol, or None for non-emitting states
        self.filler: list = []     # True for SIL/NSE filler states
        self._arcs: list = []
        self.final: set = set()
        self.labels: list = []
        self.start = None

    def add_state(self, phone=None, filler=False) -> int:
        self.phone.append(phone)
        self.filler.append(filler)
        self._arcs.append([])
        return len(self.phone) - 1

    def add_arc(self, src, dest, weight=0.0, label=None):
        self._arcs[src].append((dest, weight, label))

    def arcs(self, s) -> list:
        return self._arcs[s]

    def is_emitting(self, s) -> bool:
        return self.phone[s] is not None

    @property
    def num_states(self) -> int:
        return len(self.phone)

    def transitions(self):
        """Yield ``(from, to, phoneme-or-None, weight, label)``, self-loops included."""
        for s in range(self.num_states):
            if self.phone[s] is not None:
                yield (s, s, self.phone[s], 0.0, None)
            for d, w, lab in self.arcs(s):
                yield (s, d, self.phone[d], w, lab)

    def phones(self) -> set:
        return {p for p in self.phone if p is not None}


def _prons(lex: Lexicon, word):
    prons = lex.entries.get(word)
    if not prons:
        raise MissingPronunciation(f"no pronunciation for {word!r}")
    return prons


def build_alignment_graph(lex: Lexicon, words) -> DecodeGraph:
    """Linear word chain with optional SIL/NSE fillers before, between and after words.

    Label ``k`` marks the end of ``words[k]``; repeated words stay distinct by position.
    """
    words = list(words)
    prons = [_prons(lex, w) for w in words]
    g = DecodeGraph(ALIGNMENT)
    g.labels = words
    junction = [g.add_state() for _ in range(len(words) + 1)]
    for k, b in enumerate(junction):
        for unit in (SIL, NSE):
            f = g.add_state(unit, filler=True)
            g.add_arc(b, f)
            g.add_arc(f, b)
        if k == len(words):
            break
        for pron in prons[k]:
            prev = b
            for ph in pron:
                s = g.add_state(ph)
                g.add_arc(prev, s)
                prev = s
            g.add_arc(prev, junction[k + 1], 0.0, k)
    g.start = junction[0]
    g.final = {junction[-1]}
    return g


class _PrefixTree:
    """Pronunciations of the vocabulary merged on shared phoneme prefixes."""

    def __init__(self, lex: Lexicon, vocab):
        self.phone = [None]
        self.children = [{}]
        self.ends: list = [[]]        # word ids whose pronunciation ends at the node
        self.under: list = [set()]    # word ids reachable below the node
        for wid, w in enumerate(vocab):
            for pron in _prons(lex, w):
                node = 0
                self.under[0].add(wid)
                for ph in pron:
                    nxt = self.children[node].get(ph)
                    if nxt is None:
                        nxt = len(self.phone)
                        self.phone.append(ph)
                        self.children.append({})
                        self.ends.append([])
                        self.under.append(set())
                        self.children[node][ph] = nxt
                    node = nxt
                    self.under[node].add(wid)
                if wid not in self.ends[node]:
                    self.ends[node].append(wid)
        self.under = [sorted(u) for u in self.under]
        self.children = [[c for _, c in sorted(ch.items())] for ch in self.children]


class TranscriptionGraph(DecodeGraph):
    """Lexicon x n-gram network, composed lazily.

    States pair an LM history with a node of the pronunciation prefix tree.
    Arcs into a tree node carry the change in the best LM score still
    reachable below it, so the full ``log_prob(h, word)`` has been paid by the
    time the word-end arc (which carries the word label) reaches the junction
    of the extended history. A junction whose history has seen the sentence
    end may hop to the sentence-begin junction, so one unit can span several
    lyric lines. Every junction is final.
    """

    def __init__(self, lex: Lexicon, lm: NGramModel):
        super().__init__(TRANSCRIPTION)
        self.lex = lex
        self.lm = lm
        self.vocab = sorted(lm.vocabulary)
        self.tree = _PrefixTree(lex, self.vocab)
        self.labels = list(self.vocab)
        self._ids: dict = {}
        self._keys: list = []
        self._expanded: list = []
        self._lp: dict = {}
        self._bos = lm.state((BOS,))
        self.start = self._state(("J", self._bos))

    def _state(self, key) -> int:
        s = self._ids.get(key)
        if s is not None:
            return s
        kind = key[0]
        if kind == "J":
            s = self.add_state()
            self.final.add(s)
        elif kind == "F":
            s = self.add_state(SIL, filler=True)
        else:
            s = self.add_state(self.tree.phone[key[2]])
        self._ids[key] = s
        self._keys.append(key)
        self._expanded.append(False)
        return s

    def key(self, s):
        return self._keys[s]

    def word_scores(self, h) -> list:
        return self._scores(h)[0]

    def lookahead(self, h, node) -> float:
        return self._scores(h)[1][node]

    def _scores(self, h):
        cached = self._lp.get(h)
        if cached is None:
            lp = log_prob_vector(self.lm, h, self.vocab)
            tree = self.tree
            la = [-math.inf] * len(tree.phone)
            # children always carry larger ids than their parent
            for node in range(len(la) - 1, -1, -1):
                best = -math.inf
                for w in tree.ends[node]:
                    if lp[w] > best:
                        best = lp[w]
                for c in tree.children[node]:
                    if la[c] > best:
                        best = la[c]
                la[node] = best
            cached = self._lp[h] = (lp, la)
        return cached

    def arcs(self, s) -> list:
        if not self._expanded[s]:
            self._expand(s)
        return self._arcs[s]

    def _expand(self, s):
        key = self._keys[s]
        out = self._arcs[s]
        kind = key[0]
        tree = self.tree
        if kind == "F":
            out.append((self._state(("J", key[1])), 0.0, None))
        else:
            h = key[1]
            node = 0 if kind == "J" else key[2]
            base = 0.0 if kind == "J" else self.lookahead(h, node)
            if kind == "J":
                out.append((self._state(("F", h)), 0.0, None))
            for child in tree.children[node]:
                out.append((self._state(("P", h, child)), self.lookahead(h, child) - base, None))
            if kind == "P":
                lp = self.word_scores(h)
                for wid in tree.ends[node]:
                    nxt = self.lm.state((*h, self.vocab[wid]))
                    out.append((self._state(("J", nxt)), lp[wid] - base, wid))
            if kind == "J" and h != self._bos and has_continuation(self.lm, h, EOS):
                out.append((self._state(("J", self._bos)), log_prob(self.lm, h, EOS), None))
        self._expanded[s] = True


def build_transcription_graph(lex: Lexicon, lm: NGramModel) -> TranscriptionGraph:
    return TranscriptionGraph(lex, lm)


def expand_all(graph: DecodeGraph, limit: int = 100_000) -> None:
    """Materialize every reachable state (small graphs only; used by checks and tests)."""
    seen = {graph.start}
    stack = [graph.start]
    while stack:
        s = stack.pop()
        for d, _, _ in graph.arcs(s):
            if d not in seen:
                if len(seen) >= limit:
                    raise RuntimeError("graph exceeds expansion limit")
                seen.add(d)
                stack.append(d)


__all__ = [
    "ALIGNMENT", "TRANSCRIPTION", "DecodeGraph", "TranscriptionGraph",
    "build_alignment_graph", "build_transcription_graph", "expand_all",
]
