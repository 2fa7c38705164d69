"""Energy-threshold voice activity detection with silence-gap merging."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .audio import EnergyTrack
from .errors import UnsortedInput


@dataclass(frozen=True)
class VoiceActivityRegion:
    start_s: float
    end_s: float

    def __post_init__(self):
        if not 0 <= self.start_s < self.end_s:
            raise ValueError(f"bad region [{self.start_s}, {self.end_s}]")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class VadConfig:
    tau_silence_s: float = 0.8
    tau_max_s: float = 6.0
    threshold_fraction: float = 0.3

    def __post_init__(self):
        if self.tau_silence_s <= 0:
            raise ValueError("tau_silence_s must be positive")
        if self.tau_max_s <= self.tau_silence_s:
            raise ValueError("tau_max_s must exceed tau_silence_s")
        if not 0 < self.threshold_fraction < 1:
            raise ValueError("threshold_fraction must lie in (0, 1)")


def detect_regions(energy: EnergyTrack, cfg: VadConfig | None = None) -> list[VoiceActivityRegion]:
    """Threshold the track at ``min + fraction * (max - min)`` and return maximal active runs."""
    cfg = cfg or VadConfig()
    values = np.asarray(energy.values)
    if values.size == 0:
        raise ValueError("empty energy track")
    lo, hi = float(values.min()), float(values.max())
    threshold = lo + cfg.threshold_fraction * (hi - lo)
    active = values >= threshold
    # run boundaries from the padded difference of the activity mask
    edges = np.diff(np.concatenate(([0], active.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [
        VoiceActivityRegion(int(a) * energy.hop_s, int(b) * energy.hop_s + energy.frame_len_s)
        for a, b in zip(starts, ends)
    ]


def merge_regions(regions, cfg: VadConfig | None = None) -> list[VoiceActivityRegion]:
    """Greedy left-to-right merge of regions separated by short silences.

    The next region is absorbed when the gap is shorter than ``tau_silence_s``,
    unless the region accumulated so far is already longer than ``tau_max_s``.
    """
    cfg = cfg or VadConfig()
    regions = list(regions)
    for prev, nxt in zip(regions, regions[1:]):
        if nxt.start_s < prev.end_s:
            raise UnsortedInput(f"region starting at {nxt.start_s} overlaps or precedes {prev.end_s}")
    if not regions:
        return []
    merged = []
    cur_start, cur_end = regions[0].start_s, regions[0].end_s
    for r in regions[1:]:
        if r.start_s - cur_end < cfg.tau_silence_s and cur_end - cur_start <= cfg.tau_max_s:
            cur_end = r.end_s
        else:
            merged.append(VoiceActivityRegion(cur_start, cur_end))
            cur_start, cur_end = r.start_s, r.end_s
    merged.append(VoiceActivityRegion(cur_start, cur_end))
    return merged


def voice_activity(energy: EnergyTrack, cfg: VadConfig | None = None) -> list[VoiceActivityRegion]:
    return merge_regions(detect_regions(energy, cfg), cfg)


def regions_to_json(regions):
    return [r.to_dict() for r in regions]
