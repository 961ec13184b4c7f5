"""Hot numeric kernels with numba acceleration and a pure-numpy fallback.

The fallback path is selected by setting ``BLINKLAB_DISABLE_NUMBA=1`` in the
environment (it also engages automatically when numba cannot be imported).
Both paths are written to produce bit-identical outputs: elementwise float
expressions use the same operation order, and the scan kernels use exact
integer/comparison logic only.  ``benchmarks/bench_kernels.py`` times one
against the other.
"""

import os

import numpy as np

# Right eye perimeter = landmark points 37..42 (1-based), left = 43..48.
# 0-based row indices into a (68, 2) landmark array, in p1..p6 order.
RIGHT_EYE = (36, 37, 38, 39, 40, 41)
LEFT_EYE = (42, 43, 44, 45, 46, 47)

# Degenerate-eye status bits returned by the EAR kernels.
STATUS_OK = 0
STATUS_RIGHT_DEGENERATE = 1
STATUS_LEFT_DEGENERATE = 2


def _numba_disabled() -> bool:
    return os.environ.get("BLINKLAB_DISABLE_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
        "on",
    )


NUMBA_ENABLED = False
if not _numba_disabled():
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


def _ear_batch_loop(pts, eps, out_ear, out_status):
    """Per-frame EAR scan: pts is (n, 68, 2); out_ear is (n, 3) r/l/mean."""
    n = pts.shape[0]
    for i in range(n):
        status = 0
        # right eye: p1..p6 = rows 36..41
        dx = pts[i, 36, 0] - pts[i, 39, 0]
        dy = pts[i, 36, 1] - pts[i, 39, 1]
        span_r = np.sqrt(dx * dx + dy * dy)
        dx = pts[i, 37, 0] - pts[i, 41, 0]
        dy = pts[i, 37, 1] - pts[i, 41, 1]
        v1 = np.sqrt(dx * dx + dy * dy)
        dx = pts[i, 38, 0] - pts[i, 40, 0]
        dy = pts[i, 38, 1] - pts[i, 40, 1]
        v2 = np.sqrt(dx * dx + dy * dy)
        if span_r < eps:
            status |= 1
            ear_r = 0.0
        else:
            ear_r = (v1 + v2) / (2.0 * span_r)
        # left eye: p1..p6 = rows 42..47
        dx = pts[i, 42, 0] - pts[i, 45, 0]
        dy = pts[i, 42, 1] - pts[i, 45, 1]
        span_l = np.sqrt(dx * dx + dy * dy)
        dx = pts[i, 43, 0] - pts[i, 47, 0]
        dy = pts[i, 43, 1] - pts[i, 47, 1]
        v1 = np.sqrt(dx * dx + dy * dy)
        dx = pts[i, 44, 0] - pts[i, 46, 0]
        dy = pts[i, 44, 1] - pts[i, 46, 1]
        v2 = np.sqrt(dx * dx + dy * dy)
        if span_l < eps:
            status |= 2
            ear_l = 0.0
        else:
            ear_l = (v1 + v2) / (2.0 * span_l)
        out_ear[i, 0] = ear_r
        out_ear[i, 1] = ear_l
        out_ear[i, 2] = (ear_l + ear_r) / 2.0
        out_status[i] = status


def _ear_batch_numpy(pts, eps, out_ear, out_status):
    """Vectorized twin of :func:`_ear_batch_loop` (same op order per element)."""

    def gap(a, b):
        dx = pts[:, a, 0] - pts[:, b, 0]
        dy = pts[:, a, 1] - pts[:, b, 1]
        return np.sqrt(dx * dx + dy * dy)

    span_r = gap(36, 39)
    ear_r = (gap(37, 41) + gap(38, 40)) / (2.0 * np.where(span_r < eps, 1.0, span_r))
    bad_r = span_r < eps
    ear_r[bad_r] = 0.0

    span_l = gap(42, 45)
    ear_l = (gap(43, 47) + gap(44, 46)) / (2.0 * np.where(span_l < eps, 1.0, span_l))
    bad_l = span_l < eps
    ear_l[bad_l] = 0.0

    out_ear[:, 0] = ear_r
    out_ear[:, 1] = ear_l
    out_ear[:, 2] = (ear_l + ear_r) / 2.0
    out_status[:] = bad_r.astype(np.uint8) | (bad_l.astype(np.uint8) << 1)


def _segment_scan_impl(
    frames,
    ears,
    th_low,
    th_high,
    gap_tolerance,
    out_start,
    out_min,
    out_reopen,
    out_open_last,
    out_end_frame,
    out_complete,
):
    """Hysteresis blink-cycle scan over one EAR stream.

    Outputs are positions into the sample arrays except ``out_end_frame``,
    which is a frame number (next start frame - 1 for complete cycles, the
    last open sample's frame otherwise).  Returns (n_cycles, n_gap_resets,
    n_discarded_partials).
    """
    n = frames.shape[0]
    nc = 0
    n_resets = 0
    n_discarded = 0
    phase_closed = False
    pending = False
    p_start = -1
    p_min = -1
    p_reopen = -1
    p_open_last = -1
    c_start = -1
    c_min = -1
    c_min_ear = 0.0
    for i in range(n):
        e = ears[i]
        if i > 0:
            missing = frames[i] - frames[i - 1] - 1
            if missing > gap_tolerance:
                if phase_closed:
                    n_discarded += 1
                if pending:
                    out_start[nc] = p_start
                    out_min[nc] = p_min
                    out_reopen[nc] = p_reopen
                    out_open_last[nc] = p_open_last
                    out_end_frame[nc] = frames[p_open_last]
                    out_complete[nc] = 0
                    nc += 1
                    pending = False
                phase_closed = False
                n_resets += 1
        if phase_closed:
            if e > th_high:
                phase_closed = False
                pending = True
                p_start = c_start
                p_min = c_min
                p_reopen = i
                p_open_last = i
            elif e < c_min_ear:
                c_min = i
                c_min_ear = e
        else:
            if e < th_low:
                if pending:
                    out_start[nc] = p_start
                    out_min[nc] = p_min
                    out_reopen[nc] = p_reopen
                    out_open_last[nc] = p_open_last
                    out_end_frame[nc] = frames[i] - 1
                    out_complete[nc] = 1
                    nc += 1
                    pending = False
                phase_closed = True
                c_start = i
                c_min = i
                c_min_ear = e
            elif pending:
                p_open_last = i
    if phase_closed:
        n_discarded += 1
    if pending:
        out_start[nc] = p_start
        out_min[nc] = p_min
        out_reopen[nc] = p_reopen
        out_open_last[nc] = p_open_last
        out_end_frame[nc] = frames[p_open_last]
        out_complete[nc] = 0
        nc += 1
    return nc, n_resets, n_discarded


def _split_scan_impl(values, labels, min_leaf):
    """Best binary Gini split over one pre-sorted feature column.

    ``values`` must be ascending and ``labels`` 0/1 in the same order.
    Returns (split_size, impurity, threshold); split_size is the number of
    rows in the left branch, or -1 when no valid split exists.  Ties keep the
    smallest split_size.  All arithmetic is derived from exact integer counts
    so the numba and fallback paths agree bitwise.
    """
    n = values.shape[0]
    total_ones = 0
    for i in range(n):
        total_ones += labels[i]
    best_size = -1
    best_imp = np.inf
    best_thr = 0.0
    ones = 0
    for i in range(n - 1):
        ones += labels[i]
        left = i + 1
        if values[i + 1] == values[i]:
            continue
        right = n - left
        if left < min_leaf or right < min_leaf:
            continue
        lo = float(ones)
        ro = float(total_ones - ones)
        ln = float(left)
        rn = float(right)
        gini_l = 1.0 - (lo / ln) * (lo / ln) - ((ln - lo) / ln) * ((ln - lo) / ln)
        gini_r = 1.0 - (ro / rn) * (ro / rn) - ((rn - ro) / rn) * ((rn - ro) / rn)
        imp = (ln * gini_l + rn * gini_r) / float(n)
        if imp < best_imp:
            best_imp = imp
            best_size = left
            best_thr = values[i] + (values[i + 1] - values[i]) / 2.0
    return best_size, best_imp, best_thr


if NUMBA_ENABLED:
    _ear_batch_fast = njit(cache=True)(_ear_batch_loop)
    _segment_scan_fast = njit(cache=True)(_segment_scan_impl)
    _split_scan_fast = njit(cache=True)(_split_scan_impl)
else:
    _ear_batch_fast = _ear_batch_numpy
    _segment_scan_fast = _segment_scan_impl
    _split_scan_fast = _split_scan_impl

# Fallback handles, kept importable regardless of the env flag so the
# benchmark (and the parity tests) can compare both paths in one process.
ear_batch_fallback = _ear_batch_numpy
segment_scan_fallback = _segment_scan_impl
split_scan_fallback = _split_scan_impl


def ear_batch(pts, eps):
    """Compute (n, 3) [right, left, mean] EAR plus per-frame status flags.

    pts: float64 array of shape (n, 68, 2).  Degenerate eyes get EAR 0.0 and
    a status bit; callers decide whether to raise or drop.
    """
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    n = pts.shape[0]
    out_ear = np.empty((n, 3), dtype=np.float64)
    out_status = np.empty(n, dtype=np.uint8)
    _ear_batch_fast(pts, float(eps), out_ear, out_status)
    return out_ear, out_status


def segment_scan(frames, ears, th_low, th_high, gap_tolerance):
    """Run the hysteresis scan; returns (cycle record arrays, stats).

    The record is a dict of equal-length arrays: start/min/reopen/open_last
    positions, end_frame frame numbers, and a complete flag.  Stats is
    (n_gap_resets, n_discarded_partials).
    """
    frames = np.ascontiguousarray(frames, dtype=np.int64)
    ears = np.ascontiguousarray(ears, dtype=np.float64)
    n = frames.shape[0]
    cap = n // 2 + 1
    out_start = np.empty(cap, dtype=np.int64)
    out_min = np.empty(cap, dtype=np.int64)
    out_reopen = np.empty(cap, dtype=np.int64)
    out_open_last = np.empty(cap, dtype=np.int64)
    out_end_frame = np.empty(cap, dtype=np.int64)
    out_complete = np.empty(cap, dtype=np.uint8)
    nc, n_resets, n_discarded = _segment_scan_fast(
        frames,
        ears,
        float(th_low),
        float(th_high),
        int(gap_tolerance),
        out_start,
        out_min,
        out_reopen,
        out_open_last,
        out_end_frame,
        out_complete,
    )
    record = {
        "start": out_start[:nc],
        "min": out_min[:nc],
        "reopen": out_reopen[:nc],
        "open_last": out_open_last[:nc],
        "end_frame": out_end_frame[:nc],
        "complete": out_complete[:nc],
    }
    return record, (int(n_resets), int(n_discarded))


def split_scan(values, labels, min_leaf=1):
    """Best Gini split of a sorted feature column; see `_split_scan_impl`."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    size, imp, thr = _split_scan_fast(values, labels, int(min_leaf))
    return int(size), float(imp), float(thr)
