"""Eye-aspect-ratio computation from 68-point facial landmark frames.

EAR for one eye is (|p2-p6| + |p3-p5|) / (2 |p1-p4|) over the six perimeter
points; the per-frame value is the mean of the right (points 37-42) and left
(points 43-48) eyes.  The left-eye horizontal span is |p43-p46|.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateEye

DEFAULT_EYE_EPSILON = 1e-9  # px; horizontal spans below this are landmark failures

N_LANDMARKS = 68


@dataclass(frozen=True)
class LandmarkFrame:
    """One video frame's 68 landmark points.

    ``points`` row i holds landmark point i+1 in the usual 68-point facial
    numbering (eyes at points 37-48).  Sub-pixel coordinates are fine.
    """

    frame_index: int
    t_ms: float
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.shape != (N_LANDMARKS, 2):
            raise ValueError(f"expected ({N_LANDMARKS}, 2) points, got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("landmark coordinates must be finite")
        if self.frame_index < 0 or self.t_ms < 0:
            raise ValueError("frame_index and t_ms must be non-negative")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class EarSample:
    """Per-frame EAR triple; ``ear`` is always (ear_left + ear_right) / 2."""

    frame_index: int
    t_ms: float
    ear_right: float
    ear_left: float
    ear: float


def compute_eye_ear(points, eps=DEFAULT_EYE_EPSILON, eye="eye", frame_index=None):
    """EAR of one eye from its six perimeter points (p1..p6 order).

    Raises DegenerateEye when the horizontal span |p1-p4| falls below eps.
    """
    p = np.asarray(points, dtype=np.float64)
    if p.shape != (6, 2):
        raise ValueError(f"expected six 2D points, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("eye points must be finite")
    dx = p[0, 0] - p[3, 0]
    dy = p[0, 1] - p[3, 1]
    span = np.sqrt(dx * dx + dy * dy)
    if span < eps:
        raise DegenerateEye(eye, frame_index=frame_index, span=float(span))
    dx = p[1, 0] - p[5, 0]
    dy = p[1, 1] - p[5, 1]
    v1 = np.sqrt(dx * dx + dy * dy)
    dx = p[2, 0] - p[4, 0]
    dy = p[2, 1] - p[4, 1]
    v2 = np.sqrt(dx * dx + dy * dy)
    return float((v1 + v2) / (2.0 * span))


def compute_frame_ear(frame: LandmarkFrame, eps=DEFAULT_EYE_EPSILON) -> EarSample:
    """Per-eye and mean EAR for one landmark frame.

    DegenerateEye carries which eye failed (right is checked first).
    """
    ear_right = compute_eye_ear(
        frame.points[list(kernels.RIGHT_EYE)], eps, "right", frame.frame_index
    )
    ear_left = compute_eye_ear(
        frame.points[list(kernels.LEFT_EYE)], eps, "left", frame.frame_index
    )
    return EarSample(
        frame_index=frame.frame_index,
        t_ms=frame.t_ms,
        ear_right=ear_right,
        ear_left=ear_left,
        ear=(ear_left + ear_right) / 2.0,
    )


def compute_stream_ear(frames, eps=DEFAULT_EYE_EPSILON):
    """Batch EAR over a landmark stream via the hot kernel.

    Degenerate frames are dropped, not zero-filled.  Returns
    (samples, dropped) where dropped is a list of (frame_index, which-eye).
    """
    frames = list(frames)
    if not frames:
        return [], []
    pts = np.stack([f.points for f in frames])
    ears, status = kernels.ear_batch(pts, eps)
    samples = []
    dropped = []
    for i, f in enumerate(frames):
        if status[i]:
            which = {1: "right", 2: "left", 3: "both"}[int(status[i])]
            dropped.append((f.frame_index, which))
            continue
        samples.append(
            EarSample(
                frame_index=f.frame_index,
                t_ms=f.t_ms,
                ear_right=float(ears[i, 0]),
                ear_left=float(ears[i, 1]),
                ear=float(ears[i, 2]),
            )
        )
    return samples, dropped
