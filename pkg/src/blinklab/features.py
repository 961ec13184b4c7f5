"""The 13 per-blink-cycle features.

Features 1-10 (set 1) are frame counts and EAR statistics of the open and
closed regions plus their signed differences from the calibration baselines;
features 11-13 (set 2) describe the within-blink dynamics: frames spent
closing, frames spent reopening, and the signed difference of the reopening
count from its calibration baseline.  Counts include the region's first
sample and exclude the next region's first sample, so f11 + f12 == f6.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IncompleteCycle, InvalidCalibration

FEATURE_NAMES = tuple(f"f{i}" for i in range(1, 14))
SET1_NAMES = FEATURE_NAMES[:10]
SET2_NAMES = FEATURE_NAMES[10:]

FEATURE_SETS = {"set1": SET1_NAMES, "all": FEATURE_NAMES}


@dataclass(frozen=True)
class FeatureVector:
    f1: int  # open-region frame count
    f2: float  # min EAR, open region
    f3: float  # max EAR, open region
    f4: float  # mean EAR, open region
    f5: float  # f4 - calibration open-region mean
    f6: int  # closed-region frame count
    f7: float  # min EAR, closed region (== the cycle's min_ear)
    f8: float  # max EAR, closed region
    f9: float  # mean EAR, closed region
    f10: float  # f9 - calibration closed-region mean
    f11: int  # frames from blink start to fully closed
    f12: int  # frames from fully closed to reopen
    f13: float  # calibration reopen-count mean - f12
    label: int | None = None
    video_id: str = ""
    blink_index: int = 0

    def values(self):
        """All 13 features in order."""
        return (
            self.f1,
            self.f2,
            self.f3,
            self.f4,
            self.f5,
            self.f6,
            self.f7,
            self.f8,
            self.f9,
            self.f10,
            self.f11,
            self.f12,
            self.f13,
        )


def extract_features(cycle, profile, *, allow_incomplete=False) -> FeatureVector:
    """Compute the 13 features of one cycle against a profile.

    Incomplete cycles (no next blink start seen) are rejected unless
    ``allow_incomplete`` is set; their open-region statistics then describe a
    truncated region.
    """
    if not cycle.complete and not allow_incomplete:
        raise IncompleteCycle(
            f"cycle at frame {cycle.start_frame} never saw the next blink start"
        )
    if not profile.has_baselines():
        raise InvalidCalibration("profile lacks reference baselines")
    open_ears = np.fromiter(
        (s.ear for s in cycle.open_samples), dtype=np.float64, count=len(cycle.open_samples)
    )
    closed_ears = np.fromiter(
        (s.ear for s in cycle.closed_samples),
        dtype=np.float64,
        count=len(cycle.closed_samples),
    )
    f4 = float(np.mean(open_ears))
    f9 = float(np.mean(closed_ears))
    f6 = len(closed_ears)
    f11 = sum(1 for s in cycle.closed_samples if s.frame_index < cycle.min_frame)
    f12 = f6 - f11
    return FeatureVector(
        f1=len(open_ears),
        f2=float(np.min(open_ears)),
        f3=float(np.max(open_ears)),
        f4=f4,
        f5=f4 - profile.ref_open_mean,
        f6=f6,
        f7=float(np.min(closed_ears)),
        f8=float(np.max(closed_ears)),
        f9=f9,
        f10=f9 - profile.ref_close_mean,
        f11=f11,
        f12=f12,
        f13=profile.ref_reopen_mean - f12,
        label=None,
        video_id=cycle.video_id,
        blink_index=cycle.blink_index,
    )


def split_sets(v: FeatureVector):
    """(f1..f10) and (f11..f13); concatenating them restores the vector."""
    vals = v.values()
    return vals[:10], vals[10:]
