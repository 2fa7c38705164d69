"""Synthetic songs: ground-truth timings plus degraded posteriorgrams.

Phoneme durations are drawn uniformly per phoneme, lines are separated by
NSE stretches, and every frame row is a softmax whose true-phoneme logit is
raised by ``1 / confusion_temperature`` above uniform jitter. With
probability ``label_noise_p`` the raised logit lands on a random symbol
instead. Ground truth is recorded before degradation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio import SampleBuffer
from .decoder.posteriorgram import Posteriorgram
from .lexicon import NSE, PHONES, Lexicon, extend_for_lyrics
from .lm import tokenize_lyrics

_ONE_HOT_LOGIT = 1e4


@dataclass(frozen=True)
class SynthSpec:
    lyrics: str
    phone_frames: tuple = (8, 20)
    gap_frames: tuple = (30, 140)
    label_noise_p: float = 0.0
    confusion_temperature: float = 0.2
    seed: int = 0
    frame_rate_hz: float = 100.0
    repeat: int = 1
    copy_gap_frames: int = 100

    def __post_init__(self):
        if not 0.0 <= self.label_noise_p <= 1.0:
            raise ValueError("label_noise_p must lie in [0, 1]")
        if self.confusion_temperature < 0:
            raise ValueError("confusion_temperature must be >= 0")
        for lo, hi in (self.phone_frames, self.gap_frames):
            if not 1 <= lo <= hi:
                raise ValueError("duration ranges must be positive with lo <= hi")
        if self.repeat < 1 or self.copy_gap_frames < 1:
            raise ValueError("repeat and copy_gap_frames must be positive")


@dataclass
class GroundTruth:
    words: list                     # (token, start_s, end_s) per flat word
    frame_labels: np.ndarray        # true symbol index per frame
    symbols: tuple
    frame_rate_hz: float
    lyrics: str = ""
    vocal: np.ndarray = field(default=None, repr=False)

    @property
    def num_frames(self) -> int:
        return len(self.frame_labels)

    def timings(self):
        return [(a, b) for _, a, b in self.words]

    def to_tsv(self) -> str:
        return "".join(f"{tok}\t{a:.3f}\t{b:.3f}\n" for tok, a, b in self.words)


def _symbols(lex: Lexicon):
    extra = sorted(lex.phones() - set(PHONES))
    return tuple(PHONES) + tuple(extra)


def _base_labels(spec: SynthSpec, doc, lex, index, rng):
    labels: list = []
    words = []
    nse = index[NSE]

    def gap():
        labels.extend([nse] * int(rng.integers(spec.gap_frames[0], spec.gap_frames[1] + 1)))

    gap()
    for li, line in enumerate(doc.lines):
        if li:
            gap()
        for tok in line[1:-1]:
            start = len(labels)
            for ph in lex.entries[tok][0]:
                labels.extend([index[ph]] * int(rng.integers(spec.phone_frames[0], spec.phone_frames[1] + 1)))
            words.append((tok, start, len(labels)))
    gap()
    return labels, words


def _rows(labels, spec: SynthSpec, k: int, rng):
    T = len(labels)
    logits = rng.random((T, k))
    peak = _ONE_HOT_LOGIT if spec.confusion_temperature == 0 else 1.0 + 1.0 / spec.confusion_temperature
    target = np.asarray(labels)
    if spec.label_noise_p > 0:
        flip = rng.random(T) < spec.label_noise_p
        target = np.where(flip, rng.integers(0, k, size=T), target)
    logits[np.arange(T), target] += peak
    m = logits.max(axis=1, keepdims=True)
    return logits - (m + np.log(np.exp(logits - m).sum(axis=1, keepdims=True)))


def synth(spec: SynthSpec, lexicon: Lexicon, g2p_rules) -> tuple[Posteriorgram, GroundTruth]:
    doc = tokenize_lyrics(spec.lyrics)
    lex = extend_for_lyrics(lexicon, doc, g2p_rules)
    symbols = _symbols(lex)
    index = {s: i for i, s in enumerate(symbols)}
    rng = np.random.default_rng(spec.seed)

    labels, words = _base_labels(spec, doc, lex, index, rng)
    rows = _rows(labels, spec, len(symbols), rng)
    all_labels, all_rows, all_words = [np.asarray(labels)], [rows], list(words)
    offset = len(labels)
    for _ in range(spec.repeat - 1):
        gap = [index[NSE]] * spec.copy_gap_frames
        all_labels += [np.asarray(gap), np.asarray(labels)]
        all_rows += [_rows(gap, spec, len(symbols), rng), rows]
        offset += spec.copy_gap_frames
        all_words += [(tok, a + offset, b + offset) for tok, a, b in words]
        offset += len(labels)

    frame_labels = np.concatenate(all_labels)
    rate = spec.frame_rate_hz
    reserved = {index["SIL"], index[NSE]}
    vocal = ~np.isin(frame_labels, list(reserved))
    lyrics = "\n".join([spec.lyrics.strip()] * spec.repeat) + "\n"
    truth = GroundTruth([(tok, a / rate, b / rate) for tok, a, b in all_words], frame_labels,
                        symbols, rate, lyrics, vocal)
    return Posteriorgram(symbols, np.concatenate(all_rows), rate), truth


def carrier_audio(truth: GroundTruth, sample_rate_hz: int = 16000, amplitude: float = 0.5,
                  tone_hz: float = 220.0) -> SampleBuffer:
    """A tone during vocal frames and digital silence elsewhere, frame-aligned with the posteriorgram."""
    per_frame = sample_rate_hz / truth.frame_rate_hz
    if per_frame != int(per_frame):
        raise ValueError("sample rate must be a multiple of the frame rate")
    per_frame = int(per_frame)
    n = truth.num_frames * per_frame
    t = np.arange(n) / sample_rate_hz
    gate = np.repeat(truth.vocal.astype(np.float64), per_frame)
    return SampleBuffer(amplitude * gate * np.sin(2 * np.pi * tone_hz * t), sample_rate_hz)
