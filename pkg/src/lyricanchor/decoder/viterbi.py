"""Frame-synchronous beam Viterbi by token passing.

Each surviving token holds its score, the frame where its current word
began and a pointer into a chain of word-link records (one per completed
word). Links are reference counted so that the number of records kept
alive by the frontier is known exactly; the working-set figure reported in
``DecodeStats`` is frontier size plus live links, the quantity that grows
with utterance length in a single-pass decode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from ..errors import InvalidPosteriorgram, NoPath
from .graph import DecodeGraph
from .posteriorgram import Posteriorgram

BYTES_PER_TOKEN = 64


@dataclass(frozen=True)
class BeamConfig:
    beam: float = 30.0
    retry_beam: float = 300.0

    def __post_init__(self):
        # an unbounded search may use an infinite beam for both passes
        if not (0 < self.beam < self.retry_beam or self.beam == self.retry_beam == math.inf):
            raise ValueError("need 0 < beam < retry_beam")


@dataclass
class DecodeStats:
    peak_active_tokens: int = 0
    total_token_expansions: int = 0
    peak_frontier: int = 0
    used_retry_beam: bool = False
    frames: int = 0

    @property
    def peak_bytes_estimate(self) -> int:
        return self.peak_active_tokens * BYTES_PER_TOKEN

    def to_dict(self):
        return {
            "peak_active_tokens": self.peak_active_tokens,
            "peak_bytes_estimate": self.peak_bytes_estimate,
            "peak_frontier": self.peak_frontier,
            "total_token_expansions": self.total_token_expansions,
            "used_retry_beam": self.used_retry_beam,
            "frames": self.frames,
        }


class HypWord(NamedTuple):
    token: str
    start_s: float
    end_s: float
    start_frame: int
    end_frame: int
    label: int


@dataclass
class Hypothesis:
    words: list
    total_logscore: float
    stats: DecodeStats

    @property
    def tokens(self) -> list[str]:
        return [w.token for w in self.words]


class _Link:
    __slots__ = ("label", "start", "end", "prev", "refs")

    def __init__(self, label, start, end, prev):
        self.label = label
        self.start = start
        self.end = end
        self.prev = prev
        self.refs = 0


class _Closure:
    """Per-decode cache of emitting successors reached through non-emitting states."""

    def __init__(self, graph: DecodeGraph, sym_index: dict):
        self.graph = graph
        self.sym_index = sym_index
        self.cols: list = []
        self.fill: list = []
        self._succ: dict = {}
        self._final: dict = {}

    def col(self, s):
        cols = self.cols
        while len(cols) <= s:
            i = len(cols)
            ph = self.graph.phone[i]
            if ph is None:
                cols.append(-1)
            else:
                try:
                    cols.append(self.sym_index[ph])
                except KeyError:
                    raise InvalidPosteriorgram(f"posteriorgram lacks phoneme {ph!r}") from None
            self.fill.append(self.graph.filler[i])
        return cols[s]

    def _walk(self, s):
        graph = self.graph
        succ: dict = {}
        final = None
        # depth-first over non-emitting states; first-found wins on equal weight
        stack = [(d, w, (lab,) if lab is not None else ()) for d, w, lab in reversed(graph.arcs(s))]
        while stack:
            d, acc, labels = stack.pop()
            if graph.phone[d] is not None:
                if d == s and not labels and acc == 0.0:
                    continue  # duplicate of the implicit self-loop
                cur = succ.get(d)
                if cur is None or acc > cur[0]:
                    succ[d] = (acc, labels)
                continue
            if d in graph.final and (final is None or acc > final[0]):
                final = (acc, labels)
            for d2, w2, lab2 in reversed(graph.arcs(d)):
                stack.append((d2, acc + w2, labels + (lab2,) if lab2 is not None else labels))
        if succ:
            self.col(max(succ))
        cols, fill = self.cols, self.fill
        entries = []
        for d, (acc, labels) in succ.items():
            if len(labels) > 1:
                raise ValueError("a single step may close at most one word")
            entries.append((d, acc, labels[0] if labels else None, cols[d], fill[d]))
        self._succ[s] = entries
        self._final[s] = final
        return entries

    def succ(self, s):
        e = self._succ.get(s)
        return e if e is not None else self._walk(s)

    def final(self, s):
        if s not in self._final:
            self._walk(s)
        return self._final[s]


def _release(link, live):
    while link is not None:
        link.refs -= 1
        if link.refs:
            break
        live[0] -= 1
        link = link.prev


def _decode(graph: DecodeGraph, post: Posteriorgram, beam: float, stats: DecodeStats):
    closure = _Closure(graph, {s: i for i, s in enumerate(post.symbols)})
    succ_cache = closure._succ
    walk = closure._walk
    cols = closure.cols
    live = [0]
    peak = stats.peak_active_tokens
    peak_frontier = stats.peak_frontier
    expansions = 0
    rows = post.log_probs
    T = rows.shape[0]
    rate = post.frame_rate_hz
    inf = math.inf

    # cand: dest -> (score, src, parent_link, label, new_start, ended_start)
    row = rows[0].tolist()
    cand: dict = {}
    if graph.phone[graph.start] is None:
        for d, w, lab, col, fill in closure.succ(graph.start):
            expansions += 1
            c = w + row[col]
            cur = cand.get(d)
            if cur is None or c > cur[0]:
                cand[d] = (c, -1, None, lab, -1 if fill else 0, 0)
    best = max((v[0] for v in cand.values()), default=-inf)

    frontier: dict = {}
    best_state = None
    for t in range(T):
        if t > 0:
            row = rows[t].tolist()
            cand = {}
            get = cand.get
            # any real candidate is a lower bound on this frame's best score
            score0 = frontier[best_state][0]
            best = score0 + row[cols[best_state]]
            floor = best - beam
            for s, (score, link, start) in frontier.items():
                expansions += 1
                c = score + row[cols[s]]
                if c >= floor:
                    cur = get(s)
                    if cur is None or c > cur[0] or (c == cur[0] and s < cur[1]):
                        cand[s] = (c, s, link, None, start, start)
                        if c > best:
                            best = c
                            floor = c - beam
                entries = succ_cache.get(s)
                if entries is None:
                    entries = walk(s)
                expansions += len(entries)
                for d, w, lab, col, fill in entries:
                    c = score + w + row[col]
                    if c < floor:
                        continue
                    cur = get(d)
                    if cur is None or c > cur[0] or (c == cur[0] and s < cur[1]):
                        if fill:
                            ns = -1
                        elif lab is not None or start < 0:
                            ns = t
                        else:
                            ns = start
                        cand[d] = (c, s, link, lab, ns, start)
                        if c > best:
                            best = c
                            floor = c - beam
        if not cand:
            break
        floor = best - beam if beam != inf else -inf
        new: dict = {}
        top = -inf
        for d, (c, src, link, lab, ns, ended_start) in cand.items():
            if c < floor:
                continue
            if lab is not None:
                nl = _Link(lab, ended_start, t, link)
                if link is not None:
                    link.refs += 1
                live[0] += 1
                link = nl
            if link is not None:
                link.refs += 1
            new[d] = (c, link, ns)
            if c > top or (c == top and d < best_state):
                top = c
                best_state = d
        for _, link, _ in frontier.values():
            if link is not None:
                _release(link, live)
        frontier = new
        size = len(frontier)
        if size > peak_frontier:
            peak_frontier = size
        if size + live[0] > peak:
            peak = size + live[0]

    stats.total_token_expansions += expansions
    stats.peak_active_tokens = peak
    stats.peak_frontier = peak_frontier
    stats.frames = T

    final = None
    for s in sorted(frontier):
        score, link, start = frontier[s]
        fin = closure.final(s)
        if fin is None:
            continue
        total = score + fin[0]
        if final is None or total > final[0]:
            final = (total, s, link, start, fin[1])
    if final is None:
        return None
    total, s, link, start, labels = final
    spans = []
    if labels:
        spans.append((labels[0], start, T))
    while link is not None:
        spans.append((link.label, link.start, link.end))
        link = link.prev
    spans.reverse()
    words = [HypWord(graph.labels[lab], a / rate, b / rate, a, b, lab) for lab, a, b in spans]
    return Hypothesis(words, total, stats)


def beam_viterbi(graph: DecodeGraph, post: Posteriorgram, cfg: BeamConfig | None = None,
                 context=None) -> Hypothesis:
    """Best path through ``graph`` over ``post``; widens to the retry beam once if needed."""
    cfg = cfg or BeamConfig()
    stats = DecodeStats()
    hyp = _decode(graph, post, cfg.beam, stats)
    if hyp is None:
        stats.used_retry_beam = True
        hyp = _decode(graph, post, cfg.retry_beam, stats)
    if hyp is None:
        raise NoPath("no token reached a final state", context)
    return hyp
