"""PCM ingestion and framewise log-energy."""
from __future__ import annotations

import wave
from dataclasses import dataclass

import numpy as np

from .errors import EmptyAudio, MalformedWav, UnsupportedFormat

ENERGY_FLOOR = 1e-10


@dataclass(frozen=True)
class SampleBuffer:
    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class FrameConfig:
    frame_len_s: float = 0.025
    hop_s: float = 0.010

    def __post_init__(self):
        if not 0 < self.hop_s <= self.frame_len_s:
            raise ValueError("need 0 < hop_s <= frame_len_s")


@dataclass(frozen=True)
class EnergyTrack:
    values: np.ndarray
    hop_s: float
    frame_len_s: float

    def __len__(self):
        return len(self.values)


def load_wav(path) -> SampleBuffer:
    """Read a 16-bit mono PCM WAV file, scaling samples into [-1, 1)."""
    try:
        with wave.open(str(path), "rb") as w:
            channels = w.getnchannels()
            width = w.getsampwidth()
            rate = w.getframerate()
            raw = w.readframes(w.getnframes())
    except wave.Error as exc:
        # the stdlib reader rejects non-PCM format codes with wave.Error too
        if "unknown format" in str(exc):
            raise UnsupportedFormat(f"{path}: {exc}") from exc
        raise MalformedWav(f"{path}: {exc}") from exc
    except EOFError as exc:
        raise MalformedWav(f"{path}: truncated file") from exc
    if channels != 1:
        raise UnsupportedFormat(f"{path}: expected 1 channel, got {channels}")
    if width != 2:
        raise UnsupportedFormat(f"{path}: expected 16-bit samples, got {8 * width}-bit")
    if len(raw) % 2:
        raise MalformedWav(f"{path}: odd number of data bytes")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return SampleBuffer(samples, rate)


def write_wav(path, buf: SampleBuffer) -> None:
    pcm = np.clip(np.round(buf.samples * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(buf.sample_rate_hz)
        w.writeframes(pcm.tobytes())


def frame_log_energy(buf: SampleBuffer, cfg: FrameConfig | None = None) -> EnergyTrack:
    """Natural log of (floor + mean square) over each full frame; a trailing partial frame is dropped."""
    cfg = cfg or FrameConfig()
    frame_len = int(round(cfg.frame_len_s * buf.sample_rate_hz))
    hop = int(round(cfg.hop_s * buf.sample_rate_hz))
    n = len(buf.samples)
    if frame_len < 1 or hop < 1:
        raise ValueError("frame and hop must each span at least one sample")
    if n < frame_len:
        raise EmptyAudio(f"{n} samples is shorter than one {frame_len}-sample frame")
    count = (n - frame_len) // hop + 1
    windows = np.lib.stride_tricks.sliding_window_view(buf.samples**2, frame_len)[::hop][:count]
    values = np.log(ENERGY_FLOOR + windows.mean(axis=1))
    return EnergyTrack(values, hop_s=hop / buf.sample_rate_hz, frame_len_s=frame_len / buf.sample_rate_hz)
