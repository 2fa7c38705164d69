"""Memory-scaling benchmark plus the figures rendered next to its TSV."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .decoder import BYTES_PER_TOKEN  # noqa: E402
from .lexicon import NSE, SIL  # noqa: E402
from .pipeline import align_song, align_song_single_pass  # noqa: E402
from .synth import SynthSpec, synth  # noqa: E402

# fixed metadata keeps PNG bytes reproducible
_PNG_META = {"Software": None}


@dataclass(frozen=True)
class ScalingRow:
    repeat: int
    frames: int
    words: int
    anchored_peak: int
    single_pass_peak: int
    anchored_ratio: float
    single_pass_ratio: float

    @property
    def anchored_bytes(self) -> int:
        return self.anchored_peak * BYTES_PER_TOKEN

    @property
    def single_pass_bytes(self) -> int:
        return self.single_pass_peak * BYTES_PER_TOKEN


def memory_scaling(lyrics_text, lexicon, g2p_rules, repeats=(1, 2, 4, 8), seed=0, noise=0.0, config=None,
                   progress=None) -> list[ScalingRow]:
    """Peak active tokens of both aligners on the song tiled k times, for each k in ``repeats``."""
    raw = []
    for k in repeats:
        post, truth = synth(SynthSpec(lyrics_text, seed=seed, label_noise_p=noise, repeat=k), lexicon, g2p_rules)
        anchored = align_song(None, post, truth.lyrics, lexicon, g2p_rules, config)
        single = align_song_single_pass(post, truth.lyrics, lexicon, g2p_rules, config)
        raw.append((k, post.num_frames, len(truth.words),
                    anchored.stats.peak_active_tokens, single.stats.peak_active_tokens))
        if progress:
            progress(f"repeat {k}: anchored {raw[-1][3]}, single pass {raw[-1][4]} tokens")
    a0, s0 = raw[0][3], raw[0][4]
    return [ScalingRow(k, f, w, a, s, round(a / a0, 4), round(s / s0, 4)) for k, f, w, a, s in raw]


def scaling_tsv(rows) -> str:
    cols = ["repeat", "frames", "words", "anchored_peak", "single_pass_peak",
            "anchored_bytes", "single_pass_bytes", "anchored_ratio", "single_pass_ratio"]
    lines = ["\t".join(cols)]
    for r in rows:
        d = asdict(r)
        d["anchored_bytes"], d["single_pass_bytes"] = r.anchored_bytes, r.single_pass_bytes
        lines.append("\t".join(str(d[c]) for c in cols))
    return "\n".join(lines) + "\n"


def plot_memory_scaling(rows, path):
    ks = [r.repeat for r in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(ks, [r.single_pass_peak for r in rows], "o-", color="tab:red", label="single pass")
    ax.plot(ks, [r.anchored_peak for r in rows], "s-", color="tab:blue", label="anchored")
    ax.set_xscale("log", base=2)
    ax.set_xticks(ks, [str(k) for k in ks])
    ax.set_xlabel("song repetitions k")
    ax.set_ylabel("peak active tokens")
    ax.grid(alpha=0.3)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)


def plot_alignment(result, post, path, truth=None):
    """Vocal evidence over time with voice regions, segment cuts and word starts."""
    p = np.exp(post.log_probs)
    vocal = 1.0 - p[:, post.index(SIL)] - p[:, post.index(NSE)]
    t = np.arange(post.num_frames) / post.frame_rate_hz
    fig, ax = plt.subplots(figsize=(10.0, 3.0))
    ax.plot(t, vocal, lw=0.5, color="0.35")
    for r in result.regions:
        ax.axvspan(r.start_s, r.end_s, color="tab:green", alpha=0.12, lw=0)
    for s in result.segments[1:]:
        ax.axvline(s.audio_start_s, color="tab:purple", lw=0.8, ls="--")
    starts = [w.start_s for w in result.word_timings]
    ax.vlines(starts, 1.02, 1.10, color="tab:blue", lw=0.6)
    if truth is not None:
        ax.vlines([a for _, a, _ in truth.words], 1.12, 1.20, color="tab:orange", lw=0.6)
    ax.set_ylim(-0.02, 1.24)
    ax.set_xlim(0, post.duration_s)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("P(vocal)")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
