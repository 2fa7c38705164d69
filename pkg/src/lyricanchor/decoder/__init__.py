from .graph import (
    ALIGNMENT,
    TRANSCRIPTION,
    DecodeGraph,
    TranscriptionGraph,
    build_alignment_graph,
    build_transcription_graph,
)
from .posteriorgram import Posteriorgram, load_posteriorgram, save_posteriorgram
from .viterbi import BYTES_PER_TOKEN, BeamConfig, DecodeStats, Hypothesis, HypWord, beam_viterbi

__all__ = [
    "ALIGNMENT", "TRANSCRIPTION", "BYTES_PER_TOKEN", "BeamConfig", "DecodeGraph", "DecodeStats",
    "Hypothesis", "HypWord", "Posteriorgram", "TranscriptionGraph", "beam_viterbi",
    "build_alignment_graph", "build_transcription_graph", "load_posteriorgram", "save_posteriorgram",
]
