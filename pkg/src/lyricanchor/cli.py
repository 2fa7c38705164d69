"""Command-line interface: align, transcribe, evaluate, synth and bench."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .audio import load_wav, write_wav
from .config import RunConfig, load_config
from .decoder import load_posteriorgram, save_posteriorgram
from .errors import InputError, NoPath, ParseError
from .lexicon import default_g2p_rules, load_g2p_rules, load_lexicon
from .lm import tokenize_lyrics
from .metrics import alignment_report, transcription_report

log = logging.getLogger("lyricanchor")

EXIT_OK, EXIT_NOPATH, EXIT_INPUT = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    # bad flags are input errors, so they share exit code 3
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return cfg.updated(
        beam=args.beam, retry_beam=args.retry_beam, n_anchor=args.n_anchor, n_segment=args.n_segment,
        lm_order=args.lm_order, tau_silence_s=args.tau_silence, tau_max_s=args.tau_max,
        g2p_rules=args.g2p_rules, jobs=args.jobs,
    )


def _rules(cfg: RunConfig):
    return load_g2p_rules(_read_text(cfg.g2p_rules)) if cfg.g2p_rules else default_g2p_rules()


def _inputs(args):
    cfg = _config(args)
    post = load_posteriorgram(args.post)
    lyrics = _read_text(args.lyrics)
    lexicon = load_lexicon(_read_text(args.lexicon))
    audio = load_wav(args.audio) if args.audio else None
    return cfg, post, lyrics, lexicon, audio


def cmd_align(args) -> int:
    from .pipeline import align_song, align_song_single_pass

    cfg, post, lyrics, lexicon, audio = _inputs(args)
    rules = _rules(cfg)
    if args.single_pass:
        result = align_song_single_pass(post, lyrics, lexicon, rules, cfg)
    else:
        result = align_song(audio, post, lyrics, lexicon, rules, cfg)
    for w in result.warnings:
        log.warning(w)
    out = Path(args.out)
    _write(out.with_suffix(".tsv"), result.to_tsv())
    _write(out.with_suffix(".json"), _dump(result.to_json(timing=args.timing)))
    if args.figure:
        from .report import plot_alignment

        plot_alignment(result, post, out.with_suffix(".png"))
    log.info("aligned %d words in %d segments, peak %d active tokens", len(result.word_timings),
             len(result.segments), result.stats.peak_active_tokens)
    return EXIT_OK


def cmd_transcribe(args) -> int:
    from .pipeline import transcribe_song

    cfg, post, lyrics, lexicon, audio = _inputs(args)
    units = transcribe_song(audio, post, lyrics, lexicon, _rules(cfg), cfg, args.units)
    rows, failed = [], 0
    for k, u in enumerate(units):
        start = getattr(u.unit, "start_s", getattr(u.unit, "audio_start_s", 0.0))
        end = getattr(u.unit, "end_s", getattr(u.unit, "audio_end_s", 0.0))
        if u.error:
            failed += 1
            log.warning("unit %d: %s", k, u.error)
        rows.append(f"{k}\t{start:.3f}\t{end:.3f}\t{u.text}\n")
    out = Path(args.out)
    _write(out.with_suffix(".units.tsv"), "".join(rows))
    combined = " ".join(u.text for u in units if u.text)
    _write(out.with_suffix(".txt"), combined + "\n")
    log.info("transcribed %d %s units (%d failed)", len(units), args.units, failed)
    return EXIT_OK


def _read_timings(path):
    words = []
    for n, line in enumerate(_read_text(path).splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"{path}: expected token<TAB>start<TAB>end", n)
        try:
            words.append((parts[0], float(parts[1]), float(parts[2])))
        except ValueError:
            raise ParseError(f"{path}: times must be numbers", n) from None
    return words


def cmd_evaluate(args) -> int:
    if args.mode == "align":
        ref, hyp = _read_timings(args.ref), _read_timings(args.hyp)
        if [t for t, _, _ in ref] != [t for t, _, _ in hyp]:
            raise InputError("reference and hypothesis list different words")
        report = alignment_report([(a, b) for _, a, b in ref], [(a, b) for _, a, b in hyp],
                                  args.tolerance, args.convention)
        payload = report.to_dict()
    else:
        ref = tokenize_lyrics(_read_text(args.ref)).words
        hyp_text = _read_text(args.hyp)
        hyp = tokenize_lyrics(hyp_text).words if hyp_text.strip() else []
        payload = transcription_report(ref, hyp).to_dict()
    sys.stdout.write(_dump(payload))
    return EXIT_OK


def cmd_synth(args) -> int:
    from .synth import SynthSpec, carrier_audio, synth

    try:
        spec = SynthSpec(_read_text(args.lyrics), seed=args.seed, label_noise_p=args.noise, repeat=args.repeat,
                         copy_gap_frames=args.copy_gap, confusion_temperature=args.temperature)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rules = load_g2p_rules(_read_text(args.g2p_rules)) if args.g2p_rules else default_g2p_rules()
    post, truth = synth(spec, load_lexicon(_read_text(args.lexicon)), rules)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_posteriorgram(out.with_suffix(".post.json"), post)
    _write(out.with_suffix(".truth.tsv"), truth.to_tsv())
    _write(out.with_suffix(".lyrics.txt"), truth.lyrics)
    if args.wav:
        write_wav(out.with_suffix(".wav"), carrier_audio(truth, args.sample_rate))
    log.info("synthesized %d frames, %d words", post.num_frames, len(truth.words))
    return EXIT_OK


def cmd_bench(args) -> int:
    from .report import memory_scaling, plot_memory_scaling, scaling_tsv

    cfg = _config(args)
    try:
        repeats = [int(k) for k in args.repeats.split(",")]
    except ValueError:
        raise InputError(f"bad --repeats list: {args.repeats}") from None
    if not repeats or min(repeats) < 1:
        raise InputError("--repeats values must be positive")
    rows = memory_scaling(_read_text(args.lyrics), load_lexicon(_read_text(args.lexicon)), _rules(cfg),
                          repeats, args.seed, args.noise, cfg, progress=log.info)
    out = Path(args.out)
    _write(out.with_suffix(".tsv"), scaling_tsv(rows))
    plot_memory_scaling(rows, out.with_suffix(".png"))
    return EXIT_OK


def _probability(text):
    p = float(text)
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not a probability")
    return p


def _tuning(p):
    g = p.add_argument_group("tuning (overrides --config)")
    g.add_argument("--config", help="JSON file of RunConfig keys")
    g.add_argument("--beam", type=float)
    g.add_argument("--retry-beam", type=float)
    g.add_argument("--n-anchor", type=int)
    g.add_argument("--n-segment", type=int)
    g.add_argument("--lm-order", type=int)
    g.add_argument("--tau-silence", type=float)
    g.add_argument("--tau-max", type=float)
    g.add_argument("--g2p-rules", help="TSV of grapheme cluster to phonemes")
    g.add_argument("--jobs", type=int, help="worker processes for per-unit decodes")


def _song_inputs(p):
    p.add_argument("--post", required=True, help="posteriorgram JSON")
    p.add_argument("--lyrics", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--audio", help="WAV file used for voice activity detection")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lyricanchor", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("align", help="word timings for lyrics against a posteriorgram")
    _song_inputs(p)
    p.add_argument("--out", default="alignment", help="output prefix for .tsv/.json/.png")
    p.add_argument("--single-pass", action="store_true", help="skip anchoring, align everything at once")
    p.add_argument("--figure", action="store_true", help="also render a PNG overview")
    p.add_argument("--timing", action="store_true", help="include wall times in the JSON stats")
    _tuning(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("transcribe", help="lyrics-biased transcription per unit")
    _song_inputs(p)
    p.add_argument("--units", choices=["var", "segment"], default="var")
    p.add_argument("--out", default="transcript", help="output prefix for .units.tsv/.txt")
    _tuning(p)
    p.set_defaults(func=cmd_transcribe)

    p = sub.add_parser("evaluate", help="compare timings or transcripts, JSON on stdout")
    p.add_argument("--mode", choices=["align", "wer"], required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--tolerance", type=float, default=0.3)
    p.add_argument("--convention", choices=["start", "midpoint"], default="start")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="oracle posteriorgram with ground truth")
    p.add_argument("--lyrics", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--noise", type=_probability, default=0.0, help="label flip probability")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--copy-gap", type=int, default=100, help="noise frames between copies")
    p.add_argument("--temperature", type=float, default=0.2)
    p.add_argument("--g2p-rules")
    p.add_argument("--wav", action="store_true", help="also write a carrier tone WAV")
    p.add_argument("--sample-rate", type=int, default=16000)
    p.add_argument("--out", default="synth", help="output prefix")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="memory scaling of anchored vs single-pass alignment")
    p.add_argument("--lyrics", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=_probability, default=0.0)
    p.add_argument("--repeats", default="1,2,4,8")
    p.add_argument("--out", default="memory_scaling", help="output prefix for .tsv/.png")
    _tuning(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors and --help both land here; hand the code back to the caller
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except NoPath as exc:
        print(f"lyricanchor: no path: {exc}", file=sys.stderr)
        return EXIT_NOPATH
    except InputError as exc:
        print(f"lyricanchor: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
