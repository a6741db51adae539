"""Command-line entry point: ``python -m app.main <command> ...``.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 weight/format error.
"""

import argparse
import logging
import sys
import time

import numpy as np

from app.audio.io import read_wav, write_wav
from app.audio.synthetic import speech_like
from app.core.errors import BaeError, UsageError
from app.core.schemas import BenchReport, ModelConfig
from app.core.settings import settings
from app.dsp.bandwidth import fluctuate, load_schedule, lowpass
from app.metrics.evaluation import bandwidth_sweep, evaluate_pair, format_report
from app.model.complexity import count_complexity, layer_table, learned_complexity
from app.model.engine import StreamingExtender, stream_raw
from app.model.graph import BaeNet
from app.model.weights import ModelWeights, generate_test_weights
from app.model.weights_io import load, save

logger = logging.getLogger("app")

VARIANTS = ("full", "lite")


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors surface as UsageError (exit code 1)."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def load_weights(path: str, variant: str | None) -> ModelWeights:
    weights = load(path)
    return weights.for_variant(variant) if variant else weights


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_extend(args) -> int:
    net = BaeNet(load_weights(args.weights, args.variant))
    wave, subtype = read_wav(args.input, net.config.sample_rate)
    started = time.perf_counter()
    out = net.process(wave)
    logger.info(
        "extended %.2f s of audio in %.2f s (%s)",
        wave.duration,
        time.perf_counter() - started,
        net.config.variant,
    )
    write_wav(args.output, out, subtype)
    return 0


def cmd_stream(args) -> int:
    net = BaeNet(load_weights(args.weights, args.variant))
    extender = StreamingExtender(net)
    rate = net.config.sample_rate
    print(
        f"latency: {extender.latency} samples ({1000 * extender.latency / rate:.1f} ms)",
        file=sys.stderr,
        flush=True,
    )
    stream_raw(extender, sys.stdin.buffer, sys.stdout.buffer, args.chunk)
    return 0


def cmd_degrade(args) -> int:
    wave, subtype = read_wav(args.input)
    if args.schedule:
        out = fluctuate(wave, load_schedule(args.schedule))
    else:
        out = lowpass(wave, args.cutoff)
    write_wav(args.output, out, subtype)
    return 0


def cmd_eval(args) -> int:
    reference, _ = read_wav(args.reference)
    degraded, _ = read_wav(args.degraded)
    results = evaluate_pair(reference, degraded, args.metrics)
    print(format_report(results, args.format))
    return 0


def cmd_bench(args) -> int:
    if args.seconds <= 0:
        raise UsageError(f"--seconds must be positive, got {args.seconds:g}")
    weights = load_weights(args.weights, args.variant)
    net = BaeNet(weights)
    report = count_complexity(weights.config)

    rng = np.random.default_rng(settings.BENCH_SEED)
    rate = weights.config.sample_rate
    noise = rng.normal(0.0, 0.1, int(args.seconds * rate))
    extender = StreamingExtender(net)
    chunk = weights.config.hop_size
    started = time.perf_counter()
    for offset in range(0, len(noise), chunk):
        extender.push(noise[offset : offset + chunk])
    elapsed = time.perf_counter() - started

    bench = BenchReport(
        variant=weights.config.variant,
        params=report.params,
        macs_per_second=report.macs_per_second,
        audio_seconds=args.seconds,
        elapsed_seconds=elapsed,
        rtf=elapsed / args.seconds,
    )
    print(format_report(bench.model_dump(), args.format))
    return 0


def cmd_count(args) -> int:
    config = ModelConfig(
        variant=args.variant,
        use_bgm=not args.no_bgm,
        use_interaction=not args.no_interaction,
        use_up_interaction=not args.no_up_interaction,
    )
    if args.layers:
        print(layer_table(config).to_string(index=False))
    report = count_complexity(config)
    results = {
        "variant": report.variant,
        "params": report.params,
        "params_m": report.params_millions,
        "macs_per_frame": report.macs_per_frame,
        "macs_per_second": report.macs_per_second,
        "gmacs_per_second": report.gmacs_per_second,
    }
    if args.layers:
        learned = learned_complexity(config)
        results["learned_macs_per_frame"] = learned.macs_per_frame
        results["learned_gmacs_per_second"] = learned.gmacs_per_second
    print(format_report(results, args.format))
    return 0


def cmd_gen_weights(args) -> int:
    save(generate_test_weights(ModelConfig(variant=args.variant), args.seed), args.output)
    return 0


def cmd_sweep(args) -> int:
    if args.weights:
        weights = load_weights(args.weights, args.variant)
    else:
        weights = generate_test_weights(ModelConfig(variant=args.variant or "full"), args.seed)
    clean = speech_like(args.seconds, weights.config.sample_rate, args.seed)
    table = bandwidth_sweep(BaeNet(weights), clean, args.cutoffs)
    if args.output:
        table.to_csv(args.output, index=False)
        logger.info("wrote %d sweep rows to %s", len(table), args.output)
    else:
        print(table.to_string(index=False, float_format=lambda v: f"{v:.3f}"))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _cutoff_list(text: str) -> list[float]:
    try:
        return [float(c) for c in text.split(",") if c.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid cutoff list '{text}'") from exc


def build_parser() -> CliParser:
    parser = CliParser(prog="bae", description="Streaming speech bandwidth extension")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    p = commands.add_parser("extend", help="Extend a WAV file offline")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--variant", choices=VARIANTS)
    p.set_defaults(func=cmd_extend)

    p = commands.add_parser("stream", help="Extend raw float32 PCM from stdin to stdout")
    p.add_argument("--weights", required=True)
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--chunk", type=int, default=settings.STREAM_CHUNK_SAMPLES)
    p.set_defaults(func=cmd_stream)

    p = commands.add_parser("degrade", help="Band-limit a WAV file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--cutoff", type=float)
    source.add_argument("--schedule")
    p.set_defaults(func=cmd_degrade)

    p = commands.add_parser("eval", help="Score a degraded WAV against a reference")
    p.add_argument("--reference", required=True)
    p.add_argument("--degraded", required=True)
    p.add_argument("--metrics", default=",".join(settings.EVAL_METRICS))
    p.add_argument("--format", choices=("text", "json"), default=settings.EVAL_OUTPUT_FORMAT)
    p.set_defaults(func=cmd_eval)

    p = commands.add_parser("bench", help="Complexity and real-time factor")
    p.add_argument("--weights", required=True)
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--seconds", type=float, default=settings.BENCH_SECONDS)
    p.add_argument("--format", choices=("text", "json"), default=settings.EVAL_OUTPUT_FORMAT)
    p.set_defaults(func=cmd_bench)

    p = commands.add_parser("count", help="Analytical parameter and MAC counts")
    p.add_argument("--variant", choices=VARIANTS, default=settings.DEFAULT_VARIANT)
    p.add_argument("--no-bgm", action="store_true")
    p.add_argument("--no-interaction", action="store_true")
    p.add_argument("--no-up-interaction", action="store_true")
    p.add_argument("--layers", action="store_true", help="Print the per-layer breakdown")
    p.add_argument("--format", choices=("text", "json"), default=settings.EVAL_OUTPUT_FORMAT)
    p.set_defaults(func=cmd_count)

    p = commands.add_parser("gen-weights", help="Write seeded test weights")
    p.add_argument("--output", required=True)
    p.add_argument("--variant", choices=VARIANTS, default=settings.DEFAULT_VARIANT)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_weights)

    p = commands.add_parser("sweep", help="Score extension across fixed cutoffs")
    p.add_argument("--weights")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--cutoffs", type=_cutoff_list, default=settings.SWEEP_CUTOFFS_HZ)
    p.add_argument("--seconds", type=float, default=settings.SWEEP_SECONDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="CSV path; prints a table when omitted")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except BaeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
