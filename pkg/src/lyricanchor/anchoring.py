"""Text alignment of transcribed words against reference lyrics and anchor-run extraction."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

MATCH, SUB, DEL, INS = "C", "S", "D", "I"


class AlignLabel(NamedTuple):
    label: str
    ref_index: Optional[int]
    hyp_index: Optional[int]


def edit_table(ref, hyp):
    """Unit-cost Levenshtein table; ``d[i][j]`` is the distance between ref[:i] and hyp[:j]."""
    n, m = len(ref), len(hyp)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        ri = ref[i - 1]
        prev, row = d[i - 1], d[i]
        for j in range(1, m + 1):
            if ri == hyp[j - 1]:
                row[j] = prev[j - 1]
            else:
                row[j] = 1 + min(prev[j - 1], prev[j], row[j - 1])
    return d


def align_words(ref, hyp) -> list[AlignLabel]:
    """Minimum edit-distance alignment with backtrace preference match > sub > del > ins."""
    ref, hyp = list(ref), list(hyp)
    d = edit_table(ref, hyp)
    i, j = len(ref), len(hyp)
    out = []
    while i or j:
        if i and j and ref[i - 1] == hyp[j - 1] and d[i][j] == d[i - 1][j - 1]:
            out.append(AlignLabel(MATCH, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i and j and d[i][j] == d[i - 1][j - 1] + 1:
            out.append(AlignLabel(SUB, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i and d[i][j] == d[i - 1][j] + 1:
            out.append(AlignLabel(DEL, i - 1, None))
            i -= 1
        else:
            out.append(AlignLabel(INS, None, j - 1))
            j -= 1
    out.reverse()
    return out


def alignment_cost(labels) -> int:
    return sum(1 for lab in labels if lab.label != MATCH)


@dataclass
class AnchorRun:
    ref_span: tuple
    hyp_span: tuple
    timings: list = field(default_factory=list)

    def __post_init__(self):
        if self.ref_span[1] - self.ref_span[0] != self.hyp_span[1] - self.hyp_span[0]:
            raise ValueError("ref and hyp spans differ in length")

    def __len__(self):
        return self.ref_span[1] - self.ref_span[0] + 1

    @property
    def ref_indices(self):
        return range(self.ref_span[0], self.ref_span[1] + 1)

    @property
    def hyp_indices(self):
        return range(self.hyp_span[0], self.hyp_span[1] + 1)

    def words(self):
        """``(flat_word_index, start_s, end_s)`` for every anchor word of the run."""
        return [(r, a, b) for r, (a, b) in zip(self.ref_indices, self.timings)]


def select_anchor_runs(labels, hyp_timings, n_anchor: int = 5) -> list[AnchorRun]:
    """Maximal runs of C labels, consecutive in both sequences, at least ``n_anchor`` long."""
    if n_anchor < 1:
        raise ValueError("n_anchor must be >= 1")
    runs = []
    cur: list = []

    def flush():
        if len(cur) >= n_anchor:
            r0, h0 = cur[0].ref_index, cur[0].hyp_index
            r1, h1 = cur[-1].ref_index, cur[-1].hyp_index
            timings = [tuple(hyp_timings[h][:2]) for h in range(h0, h1 + 1)]
            runs.append(AnchorRun((r0, r1), (h0, h1), timings))
        cur.clear()

    for lab in labels:
        if lab.label == MATCH:
            if cur and (lab.ref_index != cur[-1].ref_index + 1 or lab.hyp_index != cur[-1].hyp_index + 1):
                flush()
            cur.append(lab)
        else:
            flush()
    flush()
    return runs
