import numpy as np
import pytest

from lyricanchor.decoder.posteriorgram import validate
from lyricanchor.lexicon import NSE, SIL
from lyricanchor.synth import SynthSpec, carrier_audio, synth

THREE = "walking down the road\nla la la\nhold on to the light\n"


def test_same_seed_same_output(lexicon, rules):
    a, ta = synth(SynthSpec(THREE, seed=4, label_noise_p=0.2), lexicon, rules)
    b, tb = synth(SynthSpec(THREE, seed=4, label_noise_p=0.2), lexicon, rules)
    assert a.log_probs.tobytes() == b.log_probs.tobytes()
    assert ta.to_tsv() == tb.to_tsv()
    c, _ = synth(SynthSpec(THREE, seed=5, label_noise_p=0.2), lexicon, rules)
    assert c.log_probs.shape != a.log_probs.shape or not np.array_equal(c.log_probs, a.log_probs)


def test_noisy_rows_stay_normalized(lexicon, rules):
    post, _ = synth(SynthSpec(THREE, seed=1, label_noise_p=0.2), lexicon, rules)
    validate(post, tolerance=1e-9)
    assert np.abs(np.exp(post.log_probs).sum(axis=1) - 1).max() < 1e-9


def test_zero_temperature_is_one_hot(lexicon, rules):
    post, truth = synth(SynthSpec(THREE, seed=2, confusion_temperature=0.0), lexicon, rules)
    assert np.array_equal(post.log_probs.argmax(axis=1), truth.frame_labels)
    assert np.exp(post.log_probs.max(axis=1)).min() > 1 - 1e-9


def test_default_peak_dominates(lexicon, rules):
    post, truth = synth(SynthSpec(THREE, seed=2), lexicon, rules)
    assert np.array_equal(post.log_probs.argmax(axis=1), truth.frame_labels)


def test_noise_moves_about_the_right_share(lexicon, rules):
    post, truth = synth(SynthSpec(THREE * 4, seed=3, label_noise_p=0.2), lexicon, rules)
    moved = np.mean(post.log_probs.argmax(axis=1) != truth.frame_labels)
    # a flip lands on the true label 1/len(symbols) of the time
    assert 0.15 < moved < 0.25


def test_words_tile_vocal_frames(lexicon, rules):
    post, truth = synth(SynthSpec(THREE, seed=6), lexicon, rules)
    covered = np.zeros(truth.num_frames, dtype=bool)
    for _, a, b in truth.words:
        fa, fb = round(a * 100), round(b * 100)
        assert not covered[fa:fb].any()
        covered[fa:fb] = True
    assert np.array_equal(covered, truth.vocal)
    nse = truth.symbols.index(NSE)
    assert not np.any(truth.frame_labels[covered] == nse)
    assert truth.num_frames == post.num_frames
    assert [w[0] for w in truth.words] == "WALKING DOWN THE ROAD LA LA LA HOLD ON TO THE LIGHT".split()


def test_durations_within_ranges(lexicon, rules):
    spec = SynthSpec("la", seed=0, phone_frames=(3, 3), gap_frames=(7, 7))
    _, truth = synth(spec, lexicon, rules)
    assert truth.num_frames == 7 + 6 + 7
    assert truth.words == [("LA", 0.07, 0.13)]


def test_repeat_frame_arithmetic(lexicon, rules):
    base, tb = synth(SynthSpec(THREE, seed=9), lexicon, rules)
    big, tk = synth(SynthSpec(THREE, seed=9, repeat=8, copy_gap_frames=50), lexicon, rules)
    assert big.num_frames == 8 * base.num_frames + 7 * 50
    assert len(tk.words) == 8 * len(tb.words)
    assert tk.lyrics == THREE * 8
    offset = (base.num_frames + 50) / 100
    assert tk.words[len(tb.words)][1] == pytest.approx(tb.words[0][1] + offset)


def test_truth_tsv_shape(lexicon, rules):
    _, truth = synth(SynthSpec("la la", seed=0, phone_frames=(2, 2), gap_frames=(5, 5)), lexicon, rules)
    assert truth.to_tsv() == "LA\t0.050\t0.090\nLA\t0.090\t0.130\n"


@pytest.mark.parametrize("kwargs", [
    {"label_noise_p": 1.5}, {"label_noise_p": -0.1}, {"confusion_temperature": -1},
    {"phone_frames": (0, 3)}, {"gap_frames": (5, 2)}, {"repeat": 0},
])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        SynthSpec("la", **kwargs)


def test_symbols_include_reserved(lexicon, rules):
    post, _ = synth(SynthSpec("la", seed=0), lexicon, rules)
    assert SIL in post.symbols and NSE in post.symbols


def test_carrier_follows_vocal_frames(lexicon, rules):
    _, truth = synth(SynthSpec(THREE, seed=1), lexicon, rules)
    audio = carrier_audio(truth, 8000)
    assert audio.duration_s == pytest.approx(truth.num_frames / 100)
    frames = audio.samples.reshape(truth.num_frames, 80)
    loud = np.abs(frames).max(axis=1) > 0.1
    assert np.array_equal(loud, truth.vocal)
    with pytest.raises(ValueError):
        carrier_audio(truth, 12345)
