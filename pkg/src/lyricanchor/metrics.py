"""Alignment (AE / PCS) and transcription (WER / CER) measures."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .anchoring import DEL, INS, SUB, align_words
from .errors import EmptyReference, IndexMismatch
from .lexicon import NOISE, normalize_word

# absorbs binary rounding in differences such as 1.3 - 1.0 when comparing to the tolerance
_EPS = 1e-9


@dataclass
class AlignmentReport:
    mean_ae_s: float
    median_ae_s: float
    pcs: float
    tolerance_s: float
    errors: list = field(default_factory=list)

    def to_dict(self, per_word=True):
        d = asdict(self)
        if not per_word:
            d.pop("errors")
        return d


@dataclass
class TranscriptionReport:
    wer: float = 0.0
    cer: float = 0.0
    word_counts: dict = field(default_factory=dict)
    char_counts: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _anchor_time(timing, convention):
    start, end = timing[0], timing[1]
    return (start + end) / 2 if convention == "midpoint" else start


def _lower_median(values):
    s = sorted(values)
    return s[(len(s) - 1) // 2]


def alignment_report(ref, hyp, tolerance_s: float = 0.3, convention: str = "start") -> AlignmentReport:
    """Per-word absolute error between predicted and reference times.

    ``ref`` and ``hyp`` are sequences of ``(start_s, end_s)`` pairs or
    mappings from flat-word index to such pairs; both must cover the same words.
    """
    if convention not in ("start", "midpoint"):
        raise ValueError(f"unknown AE convention {convention!r}")
    ref_map = ref if isinstance(ref, dict) else dict(enumerate(ref))
    hyp_map = hyp if isinstance(hyp, dict) else dict(enumerate(hyp))
    if set(ref_map) != set(hyp_map):
        raise IndexMismatch(f"reference covers {len(ref_map)} words, hypothesis {len(hyp_map)}")
    if not ref_map:
        raise IndexMismatch("no words to evaluate")
    errors = [abs(_anchor_time(hyp_map[i], convention) - _anchor_time(ref_map[i], convention))
              for i in sorted(ref_map)]
    pcs = sum(e <= tolerance_s + _EPS for e in errors) / len(errors)
    return AlignmentReport(sum(errors) / len(errors), _lower_median(errors), pcs, tolerance_s, errors)


def _counts(ref, hyp):
    labels = align_words(ref, hyp)
    c = {"sub": 0, "del": 0, "ins": 0, "ref_len": len(ref)}
    for lab in labels:
        if lab.label == SUB:
            c["sub"] += 1
        elif lab.label == DEL:
            c["del"] += 1
        elif lab.label == INS:
            c["ins"] += 1
    return c


def _rate(c):
    return (c["sub"] + c["del"] + c["ins"]) / c["ref_len"]


def _tokens(seq):
    if isinstance(seq, str):
        seq = seq.split()
    return [t for t in (normalize_word(w) for w in seq) if t and t != NOISE]


def wer(ref, hyp) -> TranscriptionReport:
    ref, hyp = _tokens(ref), _tokens(hyp)
    if not ref:
        raise EmptyReference("reference has no words")
    c = _counts(ref, hyp)
    return TranscriptionReport(wer=_rate(c), word_counts=c)


def cer(ref, hyp) -> TranscriptionReport:
    """Character error rate over the space-joined normalized token streams (spaces count)."""
    ref_chars = list(" ".join(_tokens(ref)))
    hyp_chars = list(" ".join(_tokens(hyp)))
    if not ref_chars:
        raise EmptyReference("reference has no characters")
    c = _counts(ref_chars, hyp_chars)
    return TranscriptionReport(cer=_rate(c), char_counts=c)


def transcription_report(ref, hyp) -> TranscriptionReport:
    w, c = wer(ref, hyp), cer(ref, hyp)
    return TranscriptionReport(w.wer, c.cer, w.word_counts, c.char_counts)


def corpus_mean(reports) -> dict:
    """Unweighted mean of per-song report fields."""
    reports = list(reports)
    if not reports:
        raise ValueError("no reports")
    if isinstance(reports[0], AlignmentReport):
        keys = ("mean_ae_s", "median_ae_s", "pcs")
    else:
        keys = ("wer", "cer")
    return {k: sum(getattr(r, k) for r in reports) / len(reports) for k in keys}
