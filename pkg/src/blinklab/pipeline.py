"""End-to-end wiring: ingestion -> calibration -> segmentation -> features ->
training / evaluation / monitoring, plus the synthetic-trace command.

One session is processed sequentially; every input frame is accounted for in
the diagnostics (calibration window + monitored + degenerate-dropped frames
add up to the input frame count).
"""

import dataclasses
import os
from dataclasses import dataclass, field

import numpy as np

from . import classify, dataio, synth
from .calibration import calibrate
from .ear import DEFAULT_EYE_EPSILON, compute_stream_ear
from .errors import InvalidConfig, SchemaMismatch
from .features import FEATURE_SETS, extract_features
from .segmenter import CycleComplete, SegmenterState, finish, segment, step

SESSION_SCHEMA_VERSION = 1


@dataclass
class PipelineConfig:
    band_fraction: float = 0.2
    window_ms: float = 120_000.0
    min_calibration_blinks: int = 3
    gap_tolerance: int = 5
    eye_epsilon: float = DEFAULT_EYE_EPSILON
    classifier: str = "random_forest"
    hyperparams: dict = field(default_factory=dict)
    feature_set: str = "all"
    folds: int = 5
    seed: int = 0
    f1_average: str = "binary"
    group_by_video: bool = False
    smoothing_window: int = 0  # majority vote over the last N blinks; 0 = off

    def validate(self):
        if not (0 < self.band_fraction < 1):
            raise InvalidConfig("band_fraction must be in (0, 1)")
        if self.window_ms <= 0:
            raise InvalidConfig("window_ms must be positive")
        if self.min_calibration_blinks < 1:
            raise InvalidConfig("min_calibration_blinks must be >= 1")
        if self.gap_tolerance < 0:
            raise InvalidConfig("gap_tolerance must be >= 0")
        if self.eye_epsilon <= 0:
            raise InvalidConfig("eye_epsilon must be positive")
        if self.classifier not in classify.ALGORITHMS:
            raise InvalidConfig(f"unknown classifier {self.classifier!r}")
        if self.feature_set not in FEATURE_SETS:
            raise InvalidConfig(f"unknown feature set {self.feature_set!r}")
        if self.folds < 2:
            raise InvalidConfig("folds must be >= 2")
        if self.f1_average not in ("binary", "macro"):
            raise InvalidConfig("f1_average must be binary or macro")
        if self.smoothing_window < 0:
            raise InvalidConfig("smoothing_window must be >= 0")
        return self

    def to_dict(self):
        return {
            "band_fraction": self.band_fraction,
            "window_ms": self.window_ms,
            "min_calibration_blinks": self.min_calibration_blinks,
            "gap_tolerance": self.gap_tolerance,
            "eye_epsilon": self.eye_epsilon,
            "classifier": self.classifier,
            "hyperparams": self.hyperparams,
            "feature_set": self.feature_set,
            "folds": self.folds,
            "seed": self.seed,
            "f1_average": self.f1_average,
            "group_by_video": self.group_by_video,
            "smoothing_window": self.smoothing_window,
        }

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        return cls(**d).validate()


@dataclass(frozen=True)
class SessionReport:
    video_id: str
    n_blinks: int
    predictions: tuple  # dicts: blink_index, label, score (+ raw_label if smoothed)
    fraction_non_drowsy: float
    fraction_drowsy: float
    calibration: dict
    warnings: dict

    def to_dict(self):
        return {
            "schema_version": SESSION_SCHEMA_VERSION,
            "video_id": self.video_id,
            "n_blinks": self.n_blinks,
            "fraction_non_drowsy": self.fraction_non_drowsy,
            "fraction_drowsy": self.fraction_drowsy,
            "calibration": self.calibration,
            "warnings": self.warnings,
            "predictions": list(self.predictions),
        }


def detect_format(path, fmt="auto"):
    if fmt != "auto":
        return fmt
    ext = os.path.splitext(path)[1].lower()
    if ext == ".jsonl":
        return "jsonl"
    if ext == ".csv":
        return "csv"
    raise InvalidConfig(f"cannot infer format of {path!r}; pass --format")


def load_stream(path, fmt="auto", eye_epsilon=DEFAULT_EYE_EPSILON):
    """Read a landmark JSONL or EAR CSV stream into EarSamples.

    Returns (samples, diagnostics); degenerate landmark frames are dropped
    and counted, never zero-filled.
    """
    fmt = detect_format(path, fmt)
    if fmt == "jsonl":
        frames = dataio.read_landmarks(path)
        samples, dropped = compute_stream_ear(frames, eye_epsilon)
        diag = {
            "input_frames": len(frames),
            "degenerate_frames": len(dropped),
            "degenerate_detail": [{"frame": f, "eye": e} for f, e in dropped],
        }
    elif fmt == "csv":
        samples = dataio.read_ear_csv(path)
        diag = {"input_frames": len(samples), "degenerate_frames": 0, "degenerate_detail": []}
    else:
        raise InvalidConfig(f"unknown stream format {fmt!r}")
    return samples, diag


def split_calibration(samples, window_ms):
    """Leading calibration window and the remainder of the stream."""
    t0 = samples[0].t_ms
    n_cal = 0
    for s in samples:
        if s.t_ms - t0 < window_ms:
            n_cal += 1
        else:
            break
    return samples[:n_cal], samples[n_cal:]


def run_extract(
    input_path,
    cfg: PipelineConfig,
    *,
    video_id=None,
    fmt="auto",
    label=None,
    features_out=None,
    cycles_out=None,
    profile_out=None,
):
    """Calibrate on the leading window, segment the rest, write features.

    ``label`` stamps a video-level class onto every row (corpora are labeled
    per video).  Returns (vectors, profile, diagnostics).
    """
    cfg.validate()
    if video_id is None:
        video_id = os.path.splitext(os.path.basename(input_path))[0]
    samples, diag = load_stream(input_path, fmt, cfg.eye_epsilon)
    profile = calibrate(
        samples,
        band_fraction=cfg.band_fraction,
        window_ms=cfg.window_ms,
        min_calibration_blinks=cfg.min_calibration_blinks,
        gap_tolerance=cfg.gap_tolerance,
    )
    cal_samples, mon_samples = split_calibration(samples, cfg.window_ms)
    cycles, seg_stats = segment(
        mon_samples,
        profile,
        video_id=video_id,
        gap_tolerance=cfg.gap_tolerance,
        with_stats=True,
    )
    vectors = [extract_features(c, profile) for c in cycles if c.complete]
    if label is not None:
        vectors = [dataclasses.replace(v, label=int(label)) for v in vectors]
    diag.update(
        calibration_frames=len(cal_samples),
        monitored_frames=len(mon_samples),
        gap_resets=seg_stats["gap_resets"],
        discarded_partials=seg_stats["discarded_partials"],
        n_cycles=len(cycles),
        n_complete_cycles=len(vectors),
        frames_accounted=(
            len(cal_samples) + len(mon_samples) + diag["degenerate_frames"]
        ),
    )
    # conservation: every input frame lands in exactly one bucket
    assert diag["frames_accounted"] == diag["input_frames"]
    if features_out:
        dataio.write_feature_csv(features_out, vectors, cfg.feature_set)
    if cycles_out:
        dataio.write_cycle_csv(cycles_out, cycles)
    if profile_out:
        dataio.write_profile(profile_out, profile)
    return vectors, profile, diag


def load_feature_dataset(paths, feature_set=None, require_labels=True):
    """Read feature CSVs into one Dataset; headers must agree across files."""
    all_ids, all_rows, all_labels = [], [], []
    csv_set = None
    for path in paths:
        fs, video_ids, _, rows, labels = dataio.read_feature_csv(path)
        if csv_set is None:
            csv_set = fs
        elif fs != csv_set:
            raise SchemaMismatch(
                f"{path} holds {fs} columns but earlier files hold {csv_set}"
            )
        all_ids += video_ids
        all_rows += rows
        all_labels += labels
    if csv_set is None:
        raise SchemaMismatch("no feature files given")
    if require_labels and any(label is None for label in all_labels):
        bad = next(i for i, label in enumerate(all_labels) if label is None)
        raise SchemaMismatch(f"row {bad} has no label; training needs labeled data")
    X = np.asarray(all_rows, dtype=np.float64)
    if feature_set is None or feature_set == csv_set:
        feature_set = csv_set
    elif feature_set == "set1" and csv_set == "all":
        X = X[:, :10]
    else:
        raise SchemaMismatch(
            f"cannot build {feature_set!r} columns from {csv_set!r} files"
        )
    y = np.asarray([0 if label is None else label for label in all_labels], dtype=np.int64)
    return classify.Dataset(X, y, feature_set=feature_set, video_ids=tuple(all_ids))


def run_train(
    feature_paths,
    cfg: PipelineConfig,
    *,
    model_out=None,
    report_out=None,
    table_out=None,
):
    """Cross-validate, then fit the final model on all rows."""
    cfg.validate()
    data = load_feature_dataset(feature_paths, cfg.feature_set)
    report = classify.cross_validate(
        data,
        cfg.classifier,
        cfg.hyperparams,
        k=cfg.folds,
        seed=cfg.seed,
        f1_average=cfg.f1_average,
        group_by_video=cfg.group_by_video,
    )
    model = classify.train(data, cfg.classifier, cfg.hyperparams, seed=cfg.seed)
    if model_out:
        dataio.write_json(model_out, model.to_dict())
    if report_out:
        dataio.write_json(report_out, report.to_dict())
    if table_out:
        table = dataio.comparison_table(
            {cfg.classifier: {data.feature_set: (report.mean_accuracy, report.mean_f1)}}
        )
        dataio.atomic_write_text(table_out, table)
    return model, report


def run_evaluate(
    feature_paths,
    cfg: PipelineConfig,
    *,
    algorithms=None,
    report_out=None,
    table_out=None,
):
    """The set1-vs-all comparison harness: CV per classifier per feature set.

    Returns (report dict, table text).  Feature files with only set1 columns
    produce a single-column table.
    """
    cfg.validate()
    algorithms = list(algorithms or classify.ALGORITHMS)
    base = load_feature_dataset(feature_paths, None)
    datasets = {}
    if base.feature_set == "all":
        datasets["set1"] = classify.Dataset(
            base.X[:, :10], base.y, feature_set="set1", video_ids=base.video_ids
        )
        datasets["all"] = base
    else:
        datasets["set1"] = base
    cells = {}
    reports = {}
    for algo in algorithms:
        cells[algo] = {}
        reports[algo] = {}
        for fs, data in datasets.items():
            rep = classify.cross_validate(
                data,
                algo,
                cfg.hyperparams if algo == cfg.classifier else None,
                k=cfg.folds,
                seed=cfg.seed,
                f1_average=cfg.f1_average,
                group_by_video=cfg.group_by_video,
            )
            cells[algo][fs] = (rep.mean_accuracy, rep.mean_f1)
            reports[algo][fs] = rep.to_dict()
    table = dataio.comparison_table(cells)
    out = {
        "schema_version": 1,
        "folds": cfg.folds,
        "seed": cfg.seed,
        "f1_average": cfg.f1_average,
        "results": reports,
    }
    if report_out:
        dataio.write_json(report_out, out)
    if table_out:
        dataio.atomic_write_text(table_out, table)
    return out, table


def _smooth(labels, window, current_raw):
    """Majority vote over the trailing window; ties keep the raw label."""
    recent = labels[-window:]
    ones = sum(recent)
    zeros = len(recent) - ones
    if ones > zeros:
        return 1
    if zeros > ones:
        return 0
    return current_raw


def run_monitor(
    input_path,
    model_path,
    cfg: PipelineConfig,
    *,
    video_id=None,
    fmt="auto",
    emit=None,
    report_out=None,
):
    """Stream a session against a trained model; one line per finished blink.

    The model file is validated against the configured feature set before the
    stream is touched.  Returns the SessionReport.
    """
    cfg.validate()
    model = classify.Model.from_dict(dataio.read_json(model_path))
    if model.feature_set != cfg.feature_set:
        raise SchemaMismatch(
            f"model holds {model.feature_set} features but the pipeline is "
            f"configured for {cfg.feature_set}"
        )
    if video_id is None:
        video_id = os.path.splitext(os.path.basename(input_path))[0]
    samples, diag = load_stream(input_path, fmt, cfg.eye_epsilon)
    profile = calibrate(
        samples,
        band_fraction=cfg.band_fraction,
        window_ms=cfg.window_ms,
        min_calibration_blinks=cfg.min_calibration_blinks,
        gap_tolerance=cfg.gap_tolerance,
    )
    cal_samples, mon_samples = split_calibration(samples, cfg.window_ms)
    state = SegmenterState(video_id=video_id, gap_tolerance=cfg.gap_tolerance)
    predictions = []
    raw_labels = []
    for sample in mon_samples:
        _, events = step(state, sample, profile)
        for event in events:
            if not isinstance(event, CycleComplete) or not event.cycle.complete:
                continue
            vector = extract_features(event.cycle, profile)
            label, score = model.predict_vector(vector)
            raw_labels.append(label)
            entry = {"blink_index": event.cycle.blink_index, "label": label, "score": score}
            if cfg.smoothing_window > 0:
                entry["raw_label"] = label
                entry["label"] = _smooth(raw_labels, cfg.smoothing_window, label)
            predictions.append(entry)
            if emit is not None:
                emit(entry)
    finish(state)
    n = len(predictions)
    drowsy = sum(p["label"] for p in predictions)
    report = SessionReport(
        video_id=video_id,
        n_blinks=n,
        predictions=tuple(predictions),
        fraction_non_drowsy=(n - drowsy) / n if n else 0.0,
        fraction_drowsy=drowsy / n if n else 0.0,
        calibration=dataio.profile_to_dict(profile),
        warnings={
            "degenerate_frames": diag["degenerate_frames"],
            "gap_resets": state.n_gap_resets,
            "discarded_partials": state.n_discarded,
            "calibration_frames": len(cal_samples),
            "monitored_frames": len(mon_samples),
            "input_frames": diag["input_frames"],
        },
    )
    if report_out:
        dataio.write_json(report_out, report.to_dict())
    return report


def run_synth(config: synth.SynthConfig, *, out=None, truth_out=None):
    """Generate a trace; write the EAR CSV and the ground-truth dump."""
    trace = synth.generate(config)
    if out:
        dataio.write_ear_csv(out, trace.samples)
    if truth_out:
        truth = {
            "schema_version": 1,
            "config": {
                "fps": config.fps,
                "duration_s": config.duration_s,
                "blink_rate": config.blink_rate,
                "blink_duration_ms": list(config.blink_duration_ms),
                "open_ear": config.open_ear,
                "closed_ear": config.closed_ear,
                "noise_sd": config.noise_sd,
                "seed": config.seed,
            },
            "blinks": [
                {
                    "index": b.index,
                    "start_frame": b.start_frame,
                    "min_frame": b.min_frame,
                    "end_frame": b.end_frame,
                }
                for b in trace.blinks
            ],
        }
        dataio.write_json(truth_out, truth)
    return trace
