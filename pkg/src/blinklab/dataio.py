"""File formats: landmark JSONL, EAR CSV, feature CSV, profile/model JSON.

All writers are byte-stable: fixed field order, floats rendered with 17
significant digits (full float64 round-trip), atomic replace on write.
"""

import csv
import io
import json
import math
import os
import tempfile

from .calibration import PROFILE_SCHEMA_VERSION, CalibrationProfile
from .ear import EarSample, LandmarkFrame, N_LANDMARKS
from .errors import MalformedInput, SchemaMismatch, StreamOrder
from .features import FEATURE_SETS, FeatureVector


def fmt_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def canonical_json(obj, indent=0) -> str:
    """Deterministic JSON: insertion-ordered keys, .17g floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {canonical_json(v, indent + 1)}"
            for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = ",\n".join(f"{inner}{canonical_json(v, indent + 1)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def atomic_write_text(path, text):
    """Write via a temp file + rename so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- landmarks


def parse_landmark_lines(lines):
    """Landmark JSONL -> LandmarkFrame list; rejects bad lines by number."""
    frames = []
    prev = None
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedInput(line_no, f"invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict) or not {"frame", "t_ms", "pts"} <= set(obj):
            raise MalformedInput(line_no, "need keys frame, t_ms, pts")
        pts = obj["pts"]
        if not isinstance(pts, list) or len(pts) != N_LANDMARKS:
            raise MalformedInput(
                line_no, f"expected {N_LANDMARKS} points, got {len(pts) if isinstance(pts, list) else 'non-list'}"
            )
        if any(not isinstance(p, list) or len(p) != 2 for p in pts):
            raise MalformedInput(line_no, "each point must be an [x, y] pair")
        try:
            frame = LandmarkFrame(
                frame_index=int(obj["frame"]), t_ms=float(obj["t_ms"]), points=pts
            )
        except (TypeError, ValueError) as exc:
            raise MalformedInput(line_no, str(exc)) from exc
        if prev is not None:
            if frame.frame_index <= prev.frame_index:
                raise StreamOrder(
                    f"line {line_no}: frame {frame.frame_index} after {prev.frame_index}"
                )
            if frame.t_ms < prev.t_ms:
                raise StreamOrder(
                    f"line {line_no}: t_ms {frame.t_ms} after {prev.t_ms}"
                )
        frames.append(frame)
        prev = frame
    return frames


def read_landmarks(path):
    with open(path) as fh:
        return parse_landmark_lines(fh)


def write_landmarks(path, frames):
    buf = io.StringIO()
    for f in frames:
        pts = ", ".join(f"[{fmt_float(x)}, {fmt_float(y)}]" for x, y in f.points)
        buf.write(
            f'{{"frame": {f.frame_index}, "t_ms": {fmt_float(f.t_ms)}, "pts": [{pts}]}}\n'
        )
    atomic_write_text(path, buf.getvalue())


# ---------------------------------------------------------------- EAR CSV

EAR_CSV_HEADER = ["frame", "t_ms", "ear"]


def ear_csv_text(samples) -> str:
    lines = [",".join(EAR_CSV_HEADER)]
    for s in samples:
        lines.append(f"{s.frame_index},{fmt_float(s.t_ms)},{fmt_float(s.ear)}")
    return "\n".join(lines) + "\n"


def write_ear_csv(path, samples):
    atomic_write_text(path, ear_csv_text(samples))


def read_ear_csv(path):
    samples = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != EAR_CSV_HEADER:
            raise SchemaMismatch(f"EAR CSV header must be {EAR_CSV_HEADER}, got {header}")
        prev = None
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise MalformedInput(line_no, f"expected 3 columns, got {len(row)}")
            try:
                frame = int(row[0])
                t_ms = float(row[1])
                ear = float(row[2])
            except ValueError as exc:
                raise MalformedInput(line_no, str(exc)) from exc
            if not math.isfinite(ear) or ear < 0:
                raise MalformedInput(line_no, f"EAR must be a finite ratio >= 0, got {row[2]}")
            if prev is not None:
                if frame <= prev.frame_index:
                    raise StreamOrder(f"line {line_no}: frame {frame} after {prev.frame_index}")
                if t_ms < prev.t_ms:
                    raise StreamOrder(f"line {line_no}: t_ms {t_ms} after {prev.t_ms}")
            sample = EarSample(frame, t_ms, ear, ear, ear)
            samples.append(sample)
            prev = sample
    return samples


# ------------------------------------------------------------- feature CSV


def feature_csv_header(feature_set):
    return ["video_id", "blink_index", *FEATURE_SETS[feature_set], "label"]


def _feature_cell(name, value):
    if name in ("f1", "f6", "f11", "f12"):
        return str(int(value))
    return fmt_float(value)


def feature_csv_text(vectors, feature_set="all") -> str:
    names = FEATURE_SETS[feature_set]
    lines = [",".join(feature_csv_header(feature_set))]
    for v in vectors:
        vals = v.values()[: len(names)]
        cells = [v.video_id, str(v.blink_index)]
        cells += [_feature_cell(n, x) for n, x in zip(names, vals)]
        cells.append("" if v.label is None else str(int(v.label)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_feature_csv(path, vectors, feature_set="all"):
    atomic_write_text(path, feature_csv_text(vectors, feature_set))


def read_feature_csv(path):
    """Returns (feature_set, video_ids, blink_indices, X rows, labels).

    Labels are ints or None (empty cell).  The feature set is inferred from
    the header; anything else is a schema mismatch.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        feature_set = None
        for name, names in FEATURE_SETS.items():
            if header == feature_csv_header(name):
                feature_set = name
                break
        if feature_set is None:
            raise SchemaMismatch(f"unrecognized feature CSV header: {header}")
        n_cols = len(FEATURE_SETS[feature_set])
        video_ids, blink_indices, rows, labels = [], [], [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n_cols + 3:
                raise MalformedInput(line_no, f"expected {n_cols + 3} columns, got {len(row)}")
            try:
                video_ids.append(row[0])
                blink_indices.append(int(row[1]))
                rows.append([float(x) for x in row[2 : 2 + n_cols]])
                labels.append(None if row[-1] == "" else int(row[-1]))
            except ValueError as exc:
                raise MalformedInput(line_no, str(exc)) from exc
    return feature_set, video_ids, blink_indices, rows, labels


# -------------------------------------------------------------- cycle dump

CYCLE_CSV_HEADER = [
    "video_id",
    "blink_index",
    "start_frame",
    "min_frame",
    "reopen_frame",
    "end_frame",
    "min_ear",
    "complete",
]


def cycle_csv_text(cycles) -> str:
    lines = [",".join(CYCLE_CSV_HEADER)]
    for c in cycles:
        lines.append(
            f"{c.video_id},{c.blink_index},{c.start_frame},{c.min_frame},"
            f"{c.reopen_frame},{c.end_frame},{fmt_float(c.min_ear)},{int(c.complete)}"
        )
    return "\n".join(lines) + "\n"


def write_cycle_csv(path, cycles):
    atomic_write_text(path, cycle_csv_text(cycles))


# ------------------------------------------------------------ profile JSON


def profile_to_dict(profile: CalibrationProfile):
    return {
        "schema_version": PROFILE_SCHEMA_VERSION,
        "ear_ref": profile.ear_ref,
        "th_low": profile.th_low,
        "th_high": profile.th_high,
        "band_fraction": profile.band_fraction,
        "window_ms": profile.window_ms,
        "ref_open_mean": profile.ref_open_mean,
        "ref_close_mean": profile.ref_close_mean,
        "ref_reopen_mean": profile.ref_reopen_mean,
        "n_calibration_blinks": profile.n_calibration_blinks,
    }


def profile_from_dict(d) -> CalibrationProfile:
    if d.get("schema_version") != PROFILE_SCHEMA_VERSION:
        raise SchemaMismatch(f"unsupported profile schema {d.get('schema_version')!r}")
    return CalibrationProfile(
        ear_ref=float(d["ear_ref"]),
        th_low=float(d["th_low"]),
        th_high=float(d["th_high"]),
        band_fraction=float(d["band_fraction"]),
        window_ms=float(d["window_ms"]),
        ref_open_mean=float(d["ref_open_mean"]),
        ref_close_mean=float(d["ref_close_mean"]),
        ref_reopen_mean=float(d["ref_reopen_mean"]),
        n_calibration_blinks=int(d["n_calibration_blinks"]),
    )


def write_profile(path, profile):
    atomic_write_text(path, canonical_json(profile_to_dict(profile)) + "\n")


def read_profile(path) -> CalibrationProfile:
    with open(path) as fh:
        return profile_from_dict(json.load(fh))


# -------------------------------------------------------------- JSON blobs


def write_json(path, obj):
    atomic_write_text(path, canonical_json(obj) + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


# ------------------------------------------------------------ report table

TABLE_ORDER = (
    "svm_linear",
    "knn",
    "logistic_regression",
    "decision_tree",
    "random_forest",
)

TABLE_LABELS = {
    "svm_linear": "SVM (linear)",
    "knn": "k-NN",
    "logistic_regression": "Logistic Regression",
    "decision_tree": "Decision Tree",
    "random_forest": "Random Forest",
}


def comparison_table(results) -> str:
    """Plain-text accuracy/F1 table.

    ``results`` maps algorithm -> feature_set -> (accuracy, f1) with values
    in [0, 1]; cells render as percentages.
    """
    sets = []
    for per_algo in results.values():
        for fs in per_algo:
            if fs not in sets:
                sets.append(fs)
    name_w = max(len(TABLE_LABELS.get(a, a)) for a in results)
    name_w = max(name_w, len("classifier"))
    col_w = 24
    head1 = " " * name_w
    head2 = "classifier".ljust(name_w)
    for fs in sets:
        title = "blink_set1" if fs == "set1" else "blink_set1+blink_set2"
        head1 += "  " + title.center(col_w)
        head2 += "  " + "Accuracy (%)".rjust(12) + "F1 (%)".rjust(12)
    lines = [head1, head2, "-" * len(head2)]
    for algo in TABLE_ORDER:
        if algo not in results:
            continue
        row = TABLE_LABELS.get(algo, algo).ljust(name_w)
        for fs in sets:
            if fs in results[algo]:
                acc, f1 = results[algo][fs]
                row += "  " + f"{100 * acc:12.2f}{100 * f1:12.2f}"
            else:
                row += "  " + " " * 24
        lines.append(row)
    return "\n".join(lines) + "\n"
