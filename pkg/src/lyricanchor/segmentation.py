"""Cut the recording and the lyrics into tiles at anchor-word end times."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import NoAnchors


@dataclass(frozen=True)
class Segment:
    audio_start_s: float
    audio_end_s: float
    word_from: int
    word_to: int  # inclusive; word_to == word_from - 1 marks an empty span

    def __post_init__(self):
        if not self.audio_start_s < self.audio_end_s:
            raise ValueError(f"empty audio span [{self.audio_start_s}, {self.audio_end_s}]")

    @property
    def lyric_span(self):
        return (self.word_from, self.word_to)

    @property
    def num_words(self) -> int:
        return self.word_to - self.word_from + 1

    def to_dict(self):
        return {"audio_start_s": round(self.audio_start_s, 6), "audio_end_s": round(self.audio_end_s, 6),
                "word_from": self.word_from, "word_to": self.word_to}


@dataclass(frozen=True)
class SegmenterConfig:
    n_segment: int = 12

    def __post_init__(self):
        if self.n_segment < 2:
            raise ValueError("n_segment must be >= 2")


def plan_segments(anchors, doc, audio_duration_s: float, first_var_start_s: float,
                  cfg: SegmenterConfig | None = None) -> list[Segment]:
    """Tile [start, duration] and all lyric words, cutting after every n-th anchor word.

    ``doc`` may be a LyricsDocument or a plain word count.
    """
    cfg = cfg or SegmenterConfig()
    total = doc if isinstance(doc, int) else len(doc)
    words = [w for run in anchors for w in run.words()]
    if not words:
        raise NoAnchors("no anchor words to segment on")
    for (i0, _, e0), (i1, s1, _) in zip(words, words[1:]):
        if i1 <= i0 or s1 < e0 - 1e-9:
            raise ValueError("anchor words must be ordered in lyrics and time")

    first_idx, first_start, _ = words[0]
    start = first_start if first_idx == 0 else min(first_var_start_s, first_start)
    cuts = []
    for n, (idx, _, end) in enumerate(words, 1):
        if n % cfg.n_segment == 0 and idx + 1 < total and end < audio_duration_s:
            cuts.append((end, idx + 1))

    times = [start] + [c[0] for c in cuts] + [audio_duration_s]
    bounds = [0] + [c[1] for c in cuts] + [total]
    return [
        Segment(times[k], times[k + 1], bounds[k], bounds[k + 1] - 1)
        for k in range(len(times) - 1)
    ]
