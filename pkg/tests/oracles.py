"""Independent reference implementations the tests check the package against.

Everything here is deliberately written on a different route than the
package: math.dist instead of explicit sqrt expressions, flatnonzero scans
instead of a running state machine, plain Python sums instead of numpy
reductions.  Keep it that way.
"""

import math

import numpy as np


def eye_ear_oracle(points):
    """Direct evaluation of the eye-aspect-ratio formula."""
    p1, p2, p3, p4, p5, p6 = [tuple(float(v) for v in p) for p in points]
    return (math.dist(p2, p6) + math.dist(p3, p5)) / (2.0 * math.dist(p1, p4))


def segment_oracle(frames, ears, th_low, th_high, gap_tolerance):
    """Full-scan two-threshold segmentation.

    Returns (cycles, n_resets, n_discarded) where each cycle is a dict with
    positional indices start/min/reopen/open_last, the end frame number, and
    a complete flag.
    """
    frames = np.asarray(frames, dtype=np.int64)
    ears = np.asarray(ears, dtype=np.float64)
    n = len(frames)
    cuts = (
        [0]
        + [i for i in range(1, n) if frames[i] - frames[i - 1] - 1 > gap_tolerance]
        + [n]
    )
    cycles = []
    n_resets = len(cuts) - 2
    n_discarded = 0
    for a, b in zip(cuts[:-1], cuts[1:]):
        marks = []
        partial_start = None  # a start that never reopened still closes its predecessor
        pos = a
        while True:
            below = np.flatnonzero(ears[pos:b] < th_low)
            if below.size == 0:
                break
            s = pos + int(below[0])
            above = np.flatnonzero(ears[s:b] > th_high)
            if above.size == 0:
                n_discarded += 1  # blink started but never reopened in this run
                partial_start = s
                break
            r = s + int(above[0])
            m = s + int(np.argmin(ears[s:r]))  # argmin keeps the earliest tie
            marks.append((s, m, r))
            pos = r
        for i, (s, m, r) in enumerate(marks):
            nxt = None
            if i + 1 < len(marks):
                nxt = marks[i + 1][0]
            elif partial_start is not None:
                nxt = partial_start
            if nxt is not None:
                cycles.append(
                    {
                        "start": s,
                        "min": m,
                        "reopen": r,
                        "open_last": nxt - 1,
                        "end_frame": int(frames[nxt]) - 1,
                        "complete": True,
                    }
                )
            else:
                cycles.append(
                    {
                        "start": s,
                        "min": m,
                        "reopen": r,
                        "open_last": b - 1,
                        "end_frame": int(frames[b - 1]),
                        "complete": False,
                    }
                )
    return cycles, n_resets, n_discarded


def cycles_match(cycles, oracle_cycles, frames):
    """True when package BlinkCycles equal oracle dicts exactly."""
    if len(cycles) != len(oracle_cycles):
        return False
    frames = np.asarray(frames, dtype=np.int64)
    for c, o in zip(cycles, oracle_cycles):
        if (
            c.start_frame != int(frames[o["start"]])
            or c.min_frame != int(frames[o["min"]])
            or c.reopen_frame != int(frames[o["reopen"]])
            or c.end_frame != o["end_frame"]
            or c.complete != o["complete"]
        ):
            return False
        n_closed = o["reopen"] - o["start"]
        n_open = o["open_last"] - o["reopen"] + 1
        if len(c.closed_samples) != n_closed or len(c.open_samples) != n_open:
            return False
    return True


def features_oracle(cycle, profile):
    """Straight-line recomputation of the 13 features from raw samples."""
    open_e = [s.ear for s in cycle.open_samples]
    closed_e = [s.ear for s in cycle.closed_samples]
    f1 = len(open_e)
    f2 = min(open_e)
    f3 = max(open_e)
    f4 = sum(open_e) / len(open_e)
    f5 = f4 - profile.ref_open_mean
    f6 = len(closed_e)
    f7 = min(closed_e)
    f8 = max(closed_e)
    f9 = sum(closed_e) / len(closed_e)
    f10 = f9 - profile.ref_close_mean
    f11 = closed_e.index(min(closed_e))  # frames before the first minimum
    f12 = f6 - f11
    f13 = profile.ref_reopen_mean - f12
    return (f1, f2, f3, f4, f5, f6, f7, f8, f9, f10, f11, f12, f13)


def synth_expected_cycles(trace, th_low, th_high):
    """Analytic cycle boundaries for a zero-noise trace and fixed thresholds.

    Requires closed_ear < th_low < th_high < open_ear.  Uses the dip's linear
    shape directly, never the segmenter.
    """
    from blinklab.synth import dip_values

    cfg = trace.config
    assert cfg.noise_sd == 0
    assert cfg.closed_ear < th_low < th_high < cfg.open_ear
    marks = []
    for b in trace.blinks:
        n_down = b.min_frame - b.start_frame
        n_up = b.end_frame - b.min_frame
        vals = dip_values(cfg.open_ear, cfg.closed_ear, n_down, n_up)
        start = next(b.start_frame + i for i, v in enumerate(vals) if v < th_low)
        reopen = None
        for j in range(n_down + 1, len(vals)):
            if vals[j] > th_high:
                reopen = b.start_frame + j
                break
        if reopen is None:
            reopen = b.end_frame + 1  # first plateau frame after the dip
        marks.append((start, b.min_frame, reopen))
    cycles = []
    last_frame = len(trace.samples) - 1
    for i, (s, m, r) in enumerate(marks):
        complete = i + 1 < len(marks)
        cycles.append(
            {
                "start_frame": s,
                "min_frame": m,
                "reopen_frame": r,
                "end_frame": marks[i + 1][0] - 1 if complete else last_frame,
                "complete": complete,
            }
        )
    return cycles
