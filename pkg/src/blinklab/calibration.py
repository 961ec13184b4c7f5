"""Per-driver calibration: EAR reference, hysteresis thresholds, baselines.

The leading window of a session is assumed non-drowsy.  Pass 1 averages the
window's EAR into ``ear_ref`` and derives the threshold pair as +/- the band
fraction (20% by default) around it.  Pass 2 segments the same window with
those thresholds and averages, per complete cycle, the open-region mean EAR,
the closed-region mean EAR, and the fully-closed-to-reopen frame count.
Those three means are the reference values the per-blink difference features
are measured against.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InsufficientBlinks, InvalidCalibration
from .segmenter import segment

DEFAULT_BAND_FRACTION = 0.2
DEFAULT_WINDOW_MS = 120_000.0
DEFAULT_MIN_CALIBRATION_BLINKS = 3

PROFILE_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CalibrationProfile:
    ear_ref: float
    th_low: float
    th_high: float
    band_fraction: float
    window_ms: float
    ref_open_mean: float
    ref_close_mean: float
    ref_reopen_mean: float
    n_calibration_blinks: int

    def has_baselines(self) -> bool:
        return (
            math.isfinite(self.ref_open_mean)
            and math.isfinite(self.ref_close_mean)
            and math.isfinite(self.ref_reopen_mean)
        )


def thresholds(ear_ref, band_fraction=DEFAULT_BAND_FRACTION):
    """Lower/upper hysteresis thresholds around the EAR reference."""
    if not (ear_ref > 0):
        raise InvalidCalibration(f"ear_ref must be positive, got {ear_ref!r}")
    if not (0 < band_fraction < 1):
        raise InvalidCalibration(
            f"band_fraction must be in (0, 1), got {band_fraction!r}"
        )
    return ear_ref * (1.0 - band_fraction), ear_ref * (1.0 + band_fraction)


def calibrate(
    samples,
    *,
    band_fraction=DEFAULT_BAND_FRACTION,
    window_ms=DEFAULT_WINDOW_MS,
    min_calibration_blinks=DEFAULT_MIN_CALIBRATION_BLINKS,
    gap_tolerance=None,
) -> CalibrationProfile:
    """Build a profile from the leading ``window_ms`` of an EAR stream.

    The stream must extend past the window (so the window is fully covered);
    degenerate samples are expected to have been dropped upstream.  Raises
    InsufficientBlinks when fewer than ``min_calibration_blinks`` complete
    cycles fall inside the window.
    """
    samples = list(samples)
    if not samples:
        raise InvalidCalibration("empty sample stream")
    t0 = samples[0].t_ms
    if samples[-1].t_ms - t0 < window_ms:
        raise InvalidCalibration(
            f"stream spans {samples[-1].t_ms - t0:.0f} ms, needs {window_ms:.0f} ms"
        )
    window = [s for s in samples if s.t_ms - t0 < window_ms]
    ears = np.fromiter((s.ear for s in window), dtype=np.float64, count=len(window))
    ear_ref = float(np.mean(ears))
    th_low, th_high = thresholds(ear_ref, band_fraction)
    profile = CalibrationProfile(
        ear_ref=ear_ref,
        th_low=th_low,
        th_high=th_high,
        band_fraction=band_fraction,
        window_ms=float(window_ms),
        ref_open_mean=math.nan,
        ref_close_mean=math.nan,
        ref_reopen_mean=math.nan,
        n_calibration_blinks=0,
    )
    cycles = segment(window, profile, gap_tolerance=gap_tolerance)
    complete = [c for c in cycles if c.complete]
    if len(complete) < min_calibration_blinks:
        raise InsufficientBlinks(len(complete), min_calibration_blinks)
    open_means = np.empty(len(complete))
    close_means = np.empty(len(complete))
    reopen_counts = np.empty(len(complete))
    for i, c in enumerate(complete):
        open_means[i] = np.mean([s.ear for s in c.open_samples])
        close_means[i] = np.mean([s.ear for s in c.closed_samples])
        reopen_counts[i] = sum(1 for s in c.closed_samples if s.frame_index >= c.min_frame)
    return replace(
        profile,
        ref_open_mean=float(np.mean(open_means)),
        ref_close_mean=float(np.mean(close_means)),
        ref_reopen_mean=float(np.mean(reopen_counts)),
        n_calibration_blinks=len(complete),
    )
