"""End-to-end anchored alignment, the single-pass baseline, and unit transcription."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .anchoring import AnchorRun, align_words, select_anchor_runs
from .audio import EnergyTrack, SampleBuffer, frame_log_energy
from .config import RunConfig
from .decoder import (
    BYTES_PER_TOKEN, Posteriorgram, beam_viterbi, build_alignment_graph, build_transcription_graph,
)
from .errors import EmptyLyrics, InputError, NoAnchors, NoPath
from .lexicon import NOISE, NSE, SIL, Lexicon, default_g2p_rules, extend_for_lyrics
from .lm import build_ngram, tokenize_lyrics
from .segmentation import Segment, plan_segments
from .vad import VoiceActivityRegion, voice_activity

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WordTiming:
    token: str
    flat_word_index: int
    start_s: float
    end_s: float
    segment_index: int


@dataclass
class PipelineStats:
    peak_active_tokens: int = 0
    stage_peaks: dict = field(default_factory=dict)
    wall_time_s: dict = field(default_factory=dict)
    decode_calls: int = 0
    retry_count: int = 0
    anchor_word_count: int = 0
    segment_count: int = 0

    @property
    def peak_bytes_estimate(self) -> int:
        return self.peak_active_tokens * BYTES_PER_TOKEN

    def record(self, stage, decode_stats):
        self.decode_calls += 1
        self.retry_count += int(decode_stats.used_retry_beam)
        p = decode_stats.peak_active_tokens
        self.stage_peaks[stage] = max(self.stage_peaks.get(stage, 0), p)
        self.peak_active_tokens = max(self.peak_active_tokens, p)

    def to_dict(self, timing=False):
        d = {
            "peak_active_tokens": self.peak_active_tokens,
            "peak_bytes_estimate": self.peak_bytes_estimate,
            "stage_peaks": dict(sorted(self.stage_peaks.items())),
            "decode_calls": self.decode_calls,
            "used_retry_beam_count": self.retry_count,
            "anchor_word_count": self.anchor_word_count,
            "segment_count": self.segment_count,
        }
        if timing:
            d["wall_time_s"] = {k: round(v, 4) for k, v in self.wall_time_s.items()}
        return d


@dataclass
class AlignmentResult:
    word_timings: list
    segments: list
    anchors: list
    stats: PipelineStats
    regions: list = field(default_factory=list)
    low_confidence: bool = False
    warnings: list = field(default_factory=list)

    def to_tsv(self) -> str:
        return "".join(f"{w.token}\t{w.start_s:.3f}\t{w.end_s:.3f}\n" for w in self.word_timings)

    def to_json(self, timing=False) -> dict:
        return {
            "words": [
                {"token": w.token, "index": w.flat_word_index, "start_s": round(w.start_s, 3),
                 "end_s": round(w.end_s, 3), "segment": w.segment_index}
                for w in self.word_timings
            ],
            "segments": [s.to_dict() for s in self.segments],
            "anchors": [
                {"ref_span": list(a.ref_span), "hyp_span": list(a.hyp_span),
                 "timings": [[round(x, 3), round(y, 3)] for x, y in a.timings]}
                for a in self.anchors
            ],
            "regions": [r.to_dict() for r in self.regions],
            "low_confidence": self.low_confidence,
            "warnings": list(self.warnings),
            "stats": self.stats.to_dict(timing),
        }


@dataclass
class UnitTranscript:
    unit: object
    words: list
    error: str | None = None

    @property
    def text(self) -> str:
        return " ".join(w.token for w in self.words if w.token != NOISE)


class _Clock:
    def __init__(self, stats):
        self.stats = stats

    def __call__(self, stage):
        return _Stage(self.stats, stage)


class _Stage:
    def __init__(self, stats, stage):
        self.stats, self.stage = stats, stage

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.stats.wall_time_s[self.stage] = self.stats.wall_time_s.get(self.stage, 0.0) + time.perf_counter() - self.t0


def frame_range(post: Posteriorgram, start_s, end_s):
    a = max(0, int(round(start_s * post.frame_rate_hz)))
    b = min(post.num_frames, int(round(end_s * post.frame_rate_hz)))
    return a, b


def posterior_energy(post: Posteriorgram) -> EnergyTrack:
    """Voice-activity evidence from the posteriorgram when no audio is supplied: ln P(not SIL/NSE)."""
    p = np.exp(post.log_probs)
    vocal = 1.0 - p[:, post.index(SIL)] - p[:, post.index(NSE)]
    step = 1.0 / post.frame_rate_hz
    return EnergyTrack(np.log(1e-10 + np.clip(vocal, 0.0, None)), step, step)


def _map(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _transcribe_task(task):
    lex, lm, post, beams, offset, context = task
    try:
        hyp = beam_viterbi(build_transcription_graph(lex, lm), post, beams, context)
    except NoPath as exc:
        return None, str(exc)
    return _shift(hyp, offset, post.frame_rate_hz), None


def _align_task(task):
    lex, words, post, beams, offset, context = task
    hyp = beam_viterbi(build_alignment_graph(lex, words), post, beams, context)
    return _shift(hyp, offset, post.frame_rate_hz)


def _shift(hyp, offset_frames, rate):
    hyp.words = [
        w._replace(start_frame=w.start_frame + offset_frames, end_frame=w.end_frame + offset_frames,
                   start_s=(w.start_frame + offset_frames) / rate, end_s=(w.end_frame + offset_frames) / rate)
        for w in hyp.words
    ]
    return hyp


def transcribe_segments(post: Posteriorgram, units, lexicon: Lexicon, lm, config: RunConfig | None = None,
                        stats: PipelineStats | None = None) -> list[UnitTranscript]:
    """Biased decode of each unit (anything with ``start_s``/``end_s`` or ``audio_start_s``/``audio_end_s``)."""
    config = config or RunConfig()
    units = list(units)
    tasks, kept = [], []
    for k, u in enumerate(units):
        start = getattr(u, "start_s", getattr(u, "audio_start_s", None))
        end = getattr(u, "end_s", getattr(u, "audio_end_s", None))
        if start is None or end is None or not 0 <= start < end or start >= post.duration_s + 1e-9:
            raise InputError(f"unit {k} [{start}, {end}] is outside the posteriorgram")
        a, b = frame_range(post, start, end)
        if b <= a:
            kept.append((u, None, f"unit {k} spans no frames"))
            continue
        tasks.append((lexicon, lm, post.slice_frames(a, b), config.beams(), a, f"unit {k}"))
        kept.append((u, len(tasks) - 1, None))
    results = _map(_transcribe_task, tasks, config.jobs)
    out = []
    for u, ti, err in kept:
        if ti is None:
            out.append(UnitTranscript(u, [], err))
            continue
        hyp, err = results[ti]
        if hyp is None:
            log.warning("transcription failed: %s", err)
            out.append(UnitTranscript(u, [], err))
            continue
        if stats is not None:
            stats.record("transcribe", hyp.stats)
        out.append(UnitTranscript(u, hyp.words))
    return out


def _check_inputs(post, audio):
    if audio is not None and abs(audio.duration_s - post.duration_s) > 1.0 / post.frame_rate_hz + 1e-9:
        raise InputError(f"audio lasts {audio.duration_s:.3f}s but posteriorgram {post.duration_s:.3f}s")


def _prepare(lyrics_text, lexicon, g2p_rules):
    doc = tokenize_lyrics(lyrics_text)
    lex = extend_for_lyrics(lexicon, doc, g2p_rules or default_g2p_rules())
    return doc, lex


def _final_pass(post, lex, doc, segments, config, stats):
    tasks, index = [], []
    for si, seg in enumerate(segments):
        if seg.num_words <= 0:
            continue
        a, b = frame_range(post, seg.audio_start_s, seg.audio_end_s)
        words = doc.words[seg.word_from:seg.word_to + 1]
        if b <= a:
            raise NoPath("segment spans no frames", f"segment {si}")
        tasks.append((lex, words, post.slice_frames(a, b), config.beams(), a,
                      f"segment {si}, words {seg.word_from}-{seg.word_to}"))
        index.append(si)
    timings = []
    for si, hyp in zip(index, _map(_align_task, tasks, config.jobs)):
        stats.record("final", hyp.stats)
        seg = segments[si]
        for k, w in enumerate(hyp.words):
            timings.append(WordTiming(w.token, seg.word_from + k, w.start_s, w.end_s, si))
    return timings


def _single_pass(post, lex, doc, config, stats):
    seg = Segment(0.0, post.duration_s, 0, len(doc) - 1)
    with _Clock(stats)("final"):
        timings = _final_pass(post, lex, doc, [seg], config, stats)
    stats.segment_count = 1
    return seg, timings


def _refine_anchor_timings(post, lex, runs, hyp_words, hyp_var, regions, config, stats):
    """Re-time anchor words by forced alignment of each VAR's transcript over that VAR."""
    needed = sorted({hyp_var[h] for run in runs for h in run.hyp_indices})
    tasks = []
    for v in needed:
        members = [h for h, var in enumerate(hyp_var) if var == v]
        a, b = frame_range(post, regions[v].start_s, regions[v].end_s)
        tasks.append((lex, [hyp_words[h].token for h in members], post.slice_frames(a, b),
                      config.beams(), a, f"anchor VAR {v}"))
    refined = {}
    for v, task in zip(needed, tasks):
        try:
            hyp = _align_task(task)
        except NoPath as exc:
            log.warning("anchor re-alignment failed, keeping transcription timings: %s", exc)
            continue
        stats.record("anchor", hyp.stats)
        members = [h for h, var in enumerate(hyp_var) if var == v]
        for h, w in zip(members, hyp.words):
            refined[h] = (w.start_s, w.end_s)
    for run in runs:
        new = [refined.get(h, run.timings[k]) for k, h in enumerate(run.hyp_indices)]
        if all(a < b for a, b in new) and all(new[k][1] <= new[k + 1][0] + 1e-9 for k in range(len(new) - 1)):
            run.timings = new
    return runs


def align_song(audio: SampleBuffer | None, post: Posteriorgram, lyrics_text, lexicon: Lexicon,
               g2p_rules=None, config: RunConfig | None = None) -> AlignmentResult:
    """Anchored two-pass alignment: VAD, biased decode, anchors, segmentation, final pass."""
    config = config or RunConfig()
    _check_inputs(post, audio)
    stats = PipelineStats()
    clock = _Clock(stats)
    with clock("prepare"):
        doc, lex = _prepare(lyrics_text, lexicon, g2p_rules)
        lm = build_ngram(doc, config.lm_order, config.lm_backoff_penalty)

    with clock("vad"):
        energy = frame_log_energy(audio, config.frames()) if audio is not None else posterior_energy(post)
        regions = voice_activity(energy, config.vad())

    with clock("transcribe"):
        transcripts = transcribe_segments(post, regions, lex, lm, config, stats)
    hyp_words, hyp_var = [], []
    for v, tr in enumerate(transcripts):
        for w in tr.words:
            if w.token != NOISE:
                hyp_words.append(w)
                hyp_var.append(v)

    with clock("anchor"):
        labels = align_words(doc.words, [w.token for w in hyp_words])
        runs = select_anchor_runs(labels, [(w.start_s, w.end_s) for w in hyp_words], config.n_anchor)
        if runs:
            runs = _refine_anchor_timings(post, lex, runs, hyp_words, hyp_var, regions, config, stats)
    stats.anchor_word_count = sum(len(r) for r in runs)

    warnings = []
    try:
        first_var = regions[0].start_s if regions else 0.0
        segments = plan_segments(runs, doc, post.duration_s, first_var, config.segmenter())
    except NoAnchors:
        msg = "no anchor words found; falling back to single-pass alignment"
        log.warning(msg)
        warnings.append(msg)
        seg, timings = _single_pass(post, lex, doc, config, stats)
        return AlignmentResult(timings, [seg], [], stats, regions, True, warnings)

    stats.segment_count = len(segments)
    with clock("final"):
        timings = _final_pass(post, lex, doc, segments, config, stats)
    return AlignmentResult(timings, segments, runs, stats, regions, False, warnings)


def align_song_single_pass(post: Posteriorgram, lyrics_text, lexicon: Lexicon, g2p_rules=None,
                           config: RunConfig | None = None) -> AlignmentResult:
    """Baseline: one forced alignment of all lyrics over the whole posteriorgram."""
    config = config or RunConfig()
    stats = PipelineStats()
    with _Clock(stats)("prepare"):
        doc, lex = _prepare(lyrics_text, lexicon, g2p_rules)
    seg, timings = _single_pass(post, lex, doc, config, stats)
    return AlignmentResult(timings, [seg], [], stats)


def transcribe_song(audio: SampleBuffer | None, post: Posteriorgram, lyrics_text, lexicon: Lexicon,
                    g2p_rules=None, config: RunConfig | None = None, units: str = "var") -> list[UnitTranscript]:
    """Biased transcription of a song over its voice regions (``var``) or its anchored segments (``segment``)."""
    if units not in ("var", "segment"):
        raise InputError(f"units must be 'var' or 'segment', not {units!r}")
    config = config or RunConfig()
    if units == "segment":
        chosen = align_song(audio, post, lyrics_text, lexicon, g2p_rules, config).segments
    else:
        _check_inputs(post, audio)
        energy = frame_log_energy(audio, config.frames()) if audio is not None else posterior_energy(post)
        chosen = voice_activity(energy, config.vad())
    doc, lex = _prepare(lyrics_text, lexicon, g2p_rules)
    lm = build_ngram(doc, config.lm_order, config.lm_backoff_penalty)
    return transcribe_segments(post, chosen, lex, lm, config)


def check_timings(result: AlignmentResult, num_words: int, duration_s: float) -> list[str]:
    """Return every violated timing invariant (empty list when the result is sound)."""
    problems = []
    idx = [w.flat_word_index for w in result.word_timings]
    if idx != list(range(num_words)):
        problems.append("word timings do not cover every lyric word exactly once in order")
    for w in result.word_timings:
        if not w.start_s < w.end_s:
            problems.append(f"word {w.flat_word_index} has start {w.start_s} >= end {w.end_s}")
        if w.start_s < -1e-9 or w.end_s > duration_s + 1e-9:
            problems.append(f"word {w.flat_word_index} lies outside the recording")
    for prev, nxt in zip(result.word_timings, result.word_timings[1:]):
        if nxt.start_s < prev.end_s - 1e-9:
            problems.append(f"word {nxt.flat_word_index} starts before word {prev.flat_word_index} ends")
    segs = result.segments
    if segs:
        # the first segment may begin at the first voiced region rather than at zero
        if abs(segs[-1].audio_end_s - duration_s) > 1e-9:
            problems.append("segments do not reach the end of the recording")
        for a, b in zip(segs, segs[1:]):
            if abs(a.audio_end_s - b.audio_start_s) > 1e-9:
                problems.append("segments leave a gap or overlap")
            if b.word_from != a.word_to + 1:
                problems.append("segment lyric spans are not contiguous")
        if segs[0].word_from != 0 or segs[-1].word_to != num_words - 1:
            problems.append("segment lyric spans do not cover all words")
        for w in result.word_timings:
            s = segs[w.segment_index]
            if w.start_s < s.audio_start_s - 1e-9 or w.end_s > s.audio_end_s + 1e-9:
                problems.append(f"word {w.flat_word_index} leaves its segment")
    return problems


__all__ = [
    "AlignmentResult", "EmptyLyrics", "PipelineStats", "UnitTranscript", "VoiceActivityRegion", "WordTiming",
    "AnchorRun", "align_song", "align_song_single_pass", "check_timings", "transcribe_segments",
    "transcribe_song",
]
