"""Every tunable of the aligner in one flat, JSON-serializable record."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace

from .audio import FrameConfig
from .decoder.viterbi import BeamConfig
from .errors import ConfigError
from .segmentation import SegmenterConfig
from .vad import VadConfig


@dataclass(frozen=True)
class RunConfig:
    tau_silence_s: float = 0.8
    tau_max_s: float = 6.0
    vad_threshold_fraction: float = 0.3
    frame_len_s: float = 0.025
    hop_s: float = 0.010
    n_anchor: int = 5
    n_segment: int = 12
    lm_order: int = 20
    lm_backoff_penalty: float = math.log(1e-4)
    beam: float = 30.0
    retry_beam: float = 300.0
    pcs_tolerance_s: float = 0.3
    ae_convention: str = "start"
    g2p_rules: str | None = None
    jobs: int = 1

    def __post_init__(self):
        try:
            self.vad()
            self.frames()
            self.beams()
            self.segmenter()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.n_anchor < 1:
            raise ConfigError("n_anchor must be >= 1")
        if self.lm_order < 1:
            raise ConfigError("lm_order must be >= 1")
        if self.lm_backoff_penalty > 0:
            raise ConfigError("lm_backoff_penalty is a log-probability and must be <= 0")
        if self.pcs_tolerance_s < 0:
            raise ConfigError("pcs_tolerance_s must be >= 0")
        if self.ae_convention not in ("start", "midpoint"):
            raise ConfigError("ae_convention must be 'start' or 'midpoint'")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def vad(self) -> VadConfig:
        return VadConfig(self.tau_silence_s, self.tau_max_s, self.vad_threshold_fraction)

    def frames(self) -> FrameConfig:
        return FrameConfig(self.frame_len_s, self.hop_s)

    def beams(self) -> BeamConfig:
        return BeamConfig(self.beam, self.retry_beam)

    def segmenter(self) -> SegmenterConfig:
        return SegmenterConfig(self.n_segment)

    def to_dict(self):
        return asdict(self)

    def updated(self, **overrides) -> "RunConfig":
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return from_dict({**self.to_dict(), **overrides})


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def from_dict(data: dict) -> RunConfig:
    unknown = sorted(set(data) - set(_TYPES))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    clean = {}
    for key, value in data.items():
        kind = _TYPES[key]
        try:
            if kind == "int":
                if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                    raise TypeError
                clean[key] = int(value)
            elif kind == "float":
                if isinstance(value, bool):
                    raise TypeError
                clean[key] = float(value)
            elif kind == "str":
                if not isinstance(value, str):
                    raise TypeError
                clean[key] = value
            else:
                if value is not None and not isinstance(value, str):
                    raise TypeError
                clean[key] = value
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return replace(RunConfig(), **clean) if clean else RunConfig()


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return from_dict(data)
