"""Frame-by-phoneme log-probability matrices and their JSON file format."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidPosteriorgram
from ..lexicon import NSE, SIL

ROW_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Posteriorgram:
    symbols: tuple
    log_probs: np.ndarray
    frame_rate_hz: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        lp = np.asarray(self.log_probs, dtype=np.float64)
        object.__setattr__(self, "log_probs", lp)
        validate(self)

    @property
    def num_frames(self) -> int:
        return self.log_probs.shape[0]

    @property
    def duration_s(self) -> float:
        return self.num_frames / self.frame_rate_hz

    def index(self, symbol) -> int:
        return self.symbols.index(symbol)

    def slice_frames(self, start: int, end: int) -> "Posteriorgram":
        start = max(0, start)
        end = min(self.num_frames, end)
        return Posteriorgram(self.symbols, self.log_probs[start:end], self.frame_rate_hz)

    def to_json(self) -> dict:
        return {
            "symbols": list(self.symbols),
            "frame_rate_hz": self.frame_rate_hz,
            "log_probs": [[float(v) for v in row] for row in self.log_probs],
        }


def validate(post: Posteriorgram, tolerance: float = ROW_TOLERANCE) -> None:
    lp = post.log_probs
    if lp.ndim != 2 or lp.shape[0] < 1:
        raise InvalidPosteriorgram("log_probs must be a non-empty frames x symbols matrix")
    if lp.shape[1] != len(post.symbols):
        raise InvalidPosteriorgram(f"{lp.shape[1]} columns for {len(post.symbols)} symbols")
    if len(set(post.symbols)) != len(post.symbols):
        raise InvalidPosteriorgram("duplicate symbols")
    for required in (SIL, NSE):
        if required not in post.symbols:
            raise InvalidPosteriorgram(f"symbol inventory lacks {required}")
    if post.frame_rate_hz <= 0:
        raise InvalidPosteriorgram("frame_rate_hz must be positive")
    if np.isnan(lp).any() or (lp > 0).any():
        raise InvalidPosteriorgram("entries must be log-probabilities")
    sums = np.exp(lp).sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tolerance)
    if bad.size:
        raise InvalidPosteriorgram(f"frame {int(bad[0])} sums to {sums[bad[0]]:.9f}, not 1")


def load_posteriorgram(path) -> Posteriorgram:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise InvalidPosteriorgram(f"{path}: {exc}") from exc
    try:
        return Posteriorgram(data["symbols"], np.asarray(data["log_probs"], dtype=np.float64),
                             float(data.get("frame_rate_hz", 100.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidPosteriorgram(f"{path}: {exc}") from exc


def save_posteriorgram(path, post: Posteriorgram) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(post.to_json(), f, separators=(",", ":"))
        f.write("\n")
