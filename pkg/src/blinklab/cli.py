"""Command-line surface: extract, train, evaluate, monitor, synth.

Data goes to files or stdout; diagnostics go to stderr.  Exit codes: 0 ok,
2 input/schema/config error, 3 insufficient calibration.
"""

import argparse
import json
import os
import sys

from . import classify, dataio
from .errors import (
    BlinklabError,
    DegenerateLabels,
    InsufficientBlinks,
    InsufficientPerClass,
    InvalidCalibration,
    InvalidConfig,
    InvalidFeature,
    MalformedInput,
    SchemaMismatch,
    StreamOrder,
)
from .pipeline import (
    PipelineConfig,
    run_evaluate,
    run_extract,
    run_monitor,
    run_synth,
    run_train,
)
from .synth import SynthConfig

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CALIBRATION = 3

_INPUT_ERRORS = (
    MalformedInput,
    SchemaMismatch,
    StreamOrder,
    InvalidConfig,
    InvalidFeature,
    DegenerateLabels,
    InsufficientPerClass,
)
_CALIBRATION_ERRORS = (InsufficientBlinks, InvalidCalibration)


def _add_config_flags(p):
    p.add_argument("--config", help="JSON pipeline config; flags override it")
    p.add_argument("--seed", type=int, help="seed for all randomness")
    p.add_argument("--feature-set", choices=("set1", "all"), dest="feature_set")
    p.add_argument("--band-fraction", type=float, dest="band_fraction")
    p.add_argument("--window-ms", type=float, dest="window_ms")
    p.add_argument("--min-calibration-blinks", type=int, dest="min_calibration_blinks")
    p.add_argument("--gap-tolerance", type=int, dest="gap_tolerance")
    p.add_argument("--folds", type=int)
    p.add_argument("--classifier", "--algorithm", dest="classifier", choices=classify.ALGORITHMS)
    p.add_argument("--hyperparams", help="JSON dict of hyperparameter overrides")
    p.add_argument("--f1-average", choices=("binary", "macro"), dest="f1_average")
    p.add_argument("--group-by-video", action="store_const", const=True, dest="group_by_video")
    p.add_argument("--smoothing-window", type=int, dest="smoothing_window")


def _build_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        cfg = PipelineConfig.from_dict(dataio.read_json(args.config))
    else:
        cfg = PipelineConfig()
    for name in (
        "seed",
        "feature_set",
        "band_fraction",
        "window_ms",
        "min_calibration_blinks",
        "gap_tolerance",
        "folds",
        "classifier",
        "f1_average",
        "group_by_video",
        "smoothing_window",
    ):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "hyperparams", None):
        try:
            overrides = json.loads(args.hyperparams)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"--hyperparams is not valid JSON: {exc.msg}") from exc
        if not isinstance(overrides, dict):
            raise InvalidConfig("--hyperparams must be a JSON object")
        cfg.hyperparams = overrides
    return cfg.validate()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="blinklab",
        description="Driver-adaptive blink-behavior analytics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic EAR trace + ground truth")
    p.add_argument("--out", required=True, help="EAR CSV path")
    p.add_argument("--truth-out", help="ground-truth JSON path")
    p.add_argument("--fps", type=float, default=30.0)
    p.add_argument("--duration-s", type=float, default=300.0)
    p.add_argument("--blink-rate", type=float, default=12.0, help="blinks per minute")
    p.add_argument(
        "--blink-duration-ms",
        type=float,
        nargs=2,
        default=(100.0, 400.0),
        metavar=("LO", "HI"),
    )
    p.add_argument("--open-ear", type=float, default=0.5)
    p.add_argument("--closed-ear", type=float, default=0.1)
    p.add_argument("--noise-sd", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("extract", help="calibrate, segment, write per-blink features")
    p.add_argument("--input", required=True, help="landmark JSONL or EAR CSV")
    p.add_argument("--format", choices=("auto", "jsonl", "csv"), default="auto")
    p.add_argument("--video-id", help="provenance id (default: input stem)")
    p.add_argument("--label", type=int, choices=(0, 1), help="video-level class for every row")
    p.add_argument("--features-out", required=True)
    p.add_argument("--cycles-out", help="optional cycle dump CSV")
    p.add_argument("--profile-out", help="optional calibration profile JSON")
    p.add_argument("--diagnostics-json", action="store_true", help="JSON diagnostics on stderr")
    _add_config_flags(p)

    p = sub.add_parser("train", help="cross-validate and fit one classifier")
    p.add_argument("--features", required=True, nargs="+", help="labeled feature CSVs")
    p.add_argument("--model-out", required=True)
    p.add_argument("--report-out", help="CV report JSON")
    p.add_argument("--table-out", help="plain-text accuracy/F1 table")
    _add_config_flags(p)

    p = sub.add_parser("evaluate", help="CV comparison across classifiers and feature sets")
    p.add_argument("--features", required=True, nargs="+")
    p.add_argument("--algorithms", nargs="+", choices=classify.ALGORITHMS)
    p.add_argument("--report-out", help="comparison report JSON")
    p.add_argument("--table-out", help="write the table here as well as stdout")
    _add_config_flags(p)

    p = sub.add_parser("monitor", help="stream a session against a trained model")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("auto", "jsonl", "csv"), default="auto")
    p.add_argument("--video-id")
    p.add_argument("--model", required=True)
    p.add_argument("--report-out", help="session report JSON (default: stdout at end)")
    p.add_argument("--diagnostics-json", action="store_true")
    _add_config_flags(p)

    return parser


def _cmd_synth(args):
    config = SynthConfig(
        fps=args.fps,
        duration_s=args.duration_s,
        blink_rate=args.blink_rate,
        blink_duration_ms=tuple(args.blink_duration_ms),
        open_ear=args.open_ear,
        closed_ear=args.closed_ear,
        noise_sd=args.noise_sd,
        seed=args.seed,
    )
    trace = run_synth(config, out=args.out, truth_out=args.truth_out)
    print(
        f"wrote {len(trace.samples)} frames, {len(trace.blinks)} blinks to {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_extract(args):
    cfg = _build_config(args)
    _, profile, diag = run_extract(
        args.input,
        cfg,
        video_id=args.video_id,
        fmt=args.format,
        label=args.label,
        features_out=args.features_out,
        cycles_out=args.cycles_out,
        profile_out=args.profile_out,
    )
    if args.diagnostics_json:
        print(dataio.canonical_json(diag), file=sys.stderr)
    else:
        print(
            f"calibrated ear_ref={profile.ear_ref:.4f} over {profile.n_calibration_blinks} "
            f"blinks; {diag['n_complete_cycles']} feature rows "
            f"({diag['degenerate_frames']} degenerate frames, {diag['gap_resets']} gap resets)",
            file=sys.stderr,
        )
    return EXIT_OK


def _cmd_train(args):
    cfg = _build_config(args)
    _, report = run_train(
        args.features,
        cfg,
        model_out=args.model_out,
        report_out=args.report_out,
        table_out=args.table_out,
    )
    print(
        f"{report.algorithm} on {report.feature_set}: mean accuracy "
        f"{report.mean_accuracy:.4f}, mean F1 {report.mean_f1:.4f} "
        f"({report.k}-fold)",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_evaluate(args):
    cfg = _build_config(args)
    _, table = run_evaluate(
        args.features,
        cfg,
        algorithms=args.algorithms,
        report_out=args.report_out,
        table_out=args.table_out,
    )
    sys.stdout.write(table)
    return EXIT_OK


def _cmd_monitor(args):
    cfg = _build_config(args)

    def emit(entry):
        sys.stdout.write(json.dumps(entry) + "\n")
        sys.stdout.flush()

    report = run_monitor(
        args.input,
        args.model,
        cfg,
        video_id=args.video_id,
        fmt=args.format,
        emit=emit,
        report_out=args.report_out,
    )
    if args.report_out is None:
        sys.stdout.write(dataio.canonical_json(report.to_dict()) + "\n")
    if args.diagnostics_json:
        print(dataio.canonical_json(report.warnings), file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "extract": _cmd_extract,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "monitor": _cmd_monitor,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _CALIBRATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BlinklabError as exc:  # anything else from this package is input-shaped
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        # the stdout consumer went away (e.g. `monitor ... | head`); exit
        # quietly without letting the interpreter whine at shutdown
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
