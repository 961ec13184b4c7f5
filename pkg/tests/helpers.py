"""Shared construction helpers for the test suite."""

import numpy as np

from blinklab.calibration import CalibrationProfile
from blinklab.ear import EarSample
from blinklab.segmenter import BlinkCycle


def eye_points(vertical_gap=2.0, span=4.0, center=(0.0, 0.0), angle=0.0):
    """Six eye-perimeter points with the given vertical gaps and span."""
    g = vertical_gap / 2.0
    pts = np.array(
        [
            [0.0, 0.0],
            [span * 0.25, g],
            [span * 0.75, g],
            [span, 0.0],
            [span * 0.75, -g],
            [span * 0.25, -g],
        ]
    )
    if angle:
        c, s = np.cos(angle), np.sin(angle)
        pts = pts @ np.array([[c, s], [-s, c]])
    return pts + np.asarray(center)


def eye_points_for_ratio(ratio, span=4.0, center=(0.0, 0.0)):
    """Eye geometry whose EAR is exactly `ratio` (both gaps equal)."""
    return eye_points(vertical_gap=ratio * span, span=span, center=center)


def frame_points(right_eye, left_eye, rng=None):
    """A full 68x2 landmark array embedding the two eyes."""
    if rng is None:
        pts = np.zeros((68, 2))
        pts[:, 0] = np.arange(68)  # arbitrary but finite filler
    else:
        pts = rng.uniform(0, 100, size=(68, 2))
    pts[36:42] = right_eye
    pts[42:48] = left_eye
    return pts


def make_samples(ears, fps=30.0, start_frame=0, frames=None):
    """EarSamples from a plain EAR sequence (contiguous frames by default)."""
    period = 1000.0 / fps
    out = []
    for i, e in enumerate(ears):
        f = start_frame + i if frames is None else frames[i]
        e = float(e)
        out.append(EarSample(f, f * period, e, e, e))
    return out


def make_profile(th_low, th_high, *, ref_open=0.5, ref_close=0.3, ref_reopen=10.0,
                 band_fraction=0.2, n_blinks=5):
    ear_ref = (th_low + th_high) / 2.0
    return CalibrationProfile(
        ear_ref=ear_ref,
        th_low=th_low,
        th_high=th_high,
        band_fraction=band_fraction,
        window_ms=120000.0,
        ref_open_mean=ref_open,
        ref_close_mean=ref_close,
        ref_reopen_mean=ref_reopen,
        n_calibration_blinks=n_blinks,
    )


def random_cycle(rng, video_id="vid", blink_index=0, *, n_closed=None, n_open=None):
    """A structurally valid BlinkCycle with random region contents."""
    n_closed = n_closed or int(rng.integers(2, 40))
    n_open = n_open or int(rng.integers(1, 40))
    closed = rng.uniform(0.05, 0.45, n_closed)
    open_ = rng.uniform(0.4, 0.7, n_open)
    start = int(rng.integers(0, 1000))
    closed_samples = make_samples(closed, start_frame=start)
    open_samples = make_samples(open_, start_frame=start + n_closed)
    min_pos = int(np.argmin(closed))
    return BlinkCycle(
        video_id=video_id,
        blink_index=blink_index,
        start_frame=start,
        min_frame=start + min_pos,
        min_ear=float(closed[min_pos]),
        reopen_frame=start + n_closed,
        end_frame=start + n_closed + n_open - 1,
        closed_samples=tuple(closed_samples),
        open_samples=tuple(open_samples),
        complete=True,
    )


def ablation_vectors(rng, n_per_class, ref_reopen=30.0):
    """Feature corpus where only the within-blink dynamics carry the label.

    f1..f10 are drawn from the same distributions for both classes; the
    closed-region split point (f11 vs f12, summing to f6) is the only
    class-dependent quantity, so set1 alone is uninformative.
    """
    from blinklab import FeatureVector

    out = []
    for label in (0, 1):
        for i in range(n_per_class):
            f1 = int(rng.integers(5, 30))
            open_vals = np.sort(rng.normal(0.5, 0.03, 3))
            f2, f4, f3 = float(open_vals[0]), float(open_vals[1]), float(open_vals[2])
            f6 = int(rng.integers(20, 41))
            closed_vals = np.sort(rng.normal(0.25, 0.05, 3))
            f7, f9, f8 = float(closed_vals[0]), float(closed_vals[1]), float(closed_vals[2])
            u = rng.uniform(0.45, 0.55) if label == 0 else rng.uniform(0.05, 0.15)
            f11 = int(round(f6 * u))
            f12 = f6 - f11
            out.append(
                FeatureVector(
                    f1=f1, f2=f2, f3=f3, f4=f4, f5=f4 - 0.5,
                    f6=f6, f7=f7, f8=f8, f9=f9, f10=f9 - 0.25,
                    f11=f11, f12=f12, f13=ref_reopen - f12,
                    label=label, video_id=f"v{label}", blink_index=i,
                )
            )
    return out


def square_wave_trace(n_cycles, *, open_ear=0.5, open_len=30, dip, fps=30.0,
                      trailing_dip_start=False, extra_tail=0):
    """Plateau/dip repetition with hand-computable statistics.

    `dip` is the per-cycle list of closed-region EAR values.  With
    `trailing_dip_start` a single extra dip sample is appended so the last
    full cycle completes inside the trace; `extra_tail` plateau samples after
    that let a calibration window end exactly before them.
    """
    ears = []
    for _ in range(n_cycles):
        ears.extend([open_ear] * open_len)
        ears.extend(dip)
    ears.extend([open_ear] * open_len)
    if trailing_dip_start:
        ears.append(dip[0])
    ears.extend([open_ear] * extra_tail)
    return make_samples(ears, fps=fps)
