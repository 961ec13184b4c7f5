"""Incremental hysteresis segmentation of EAR streams into blink cycles.

A cycle runs from one blink start (EAR dropping below the lower threshold)
to the next blink start.  The closed region spans [start, reopen) where the
reopen frame is the first sample back above the upper threshold; everything
from the reopen frame to the next start belongs to the open region.  Samples
between the two thresholds never change phase, which is what makes the pair
of thresholds chatter-proof.
"""

from dataclasses import dataclass, field

import numpy as np

from .ear import EarSample
from .errors import StreamOrder
from . import kernels

DEFAULT_GAP_TOLERANCE = 5  # missing frames tolerated before the state resets

PHASE_OPEN = "OPEN"
PHASE_CLOSED = "CLOSED"


@dataclass(frozen=True)
class BlinkCycle:
    """One segmented blink cycle.

    ``closed_samples`` covers [start_frame, reopen_frame) and always contains
    the minimum; ``open_samples`` covers [reopen_frame, end_frame].  A cycle
    is complete once the next blink start has been seen; trailing cycles and
    cycles cut off by a gap reset are flagged incomplete.
    """

    video_id: str
    blink_index: int
    start_frame: int
    min_frame: int
    min_ear: float
    reopen_frame: int
    end_frame: int
    closed_samples: tuple
    open_samples: tuple
    complete: bool


@dataclass(frozen=True)
class BlinkStart:
    frame_index: int


@dataclass(frozen=True)
class Reopened:
    frame_index: int


@dataclass(frozen=True)
class CycleComplete:
    cycle: BlinkCycle


@dataclass(frozen=True)
class GapReset:
    frame_index: int
    missing: int
    discarded_partial: bool


@dataclass
class SegmenterState:
    """Mutable per-stream state; single consumer, hand-off between calls OK."""

    video_id: str = ""
    gap_tolerance: int = DEFAULT_GAP_TOLERANCE
    phase: str = PHASE_OPEN
    last_frame: int | None = None
    n_cycles: int = 0
    n_gap_resets: int = 0
    n_discarded: int = 0
    n_samples: int = 0
    _closed: list = field(default_factory=list)
    _pending_closed: list = field(default_factory=list)
    _pending_open: list = field(default_factory=list)
    _min_pos: int = -1
    _has_pending: bool = False
    _p_start: int = -1
    _p_min_frame: int = -1
    _p_min_ear: float = 0.0
    _p_reopen: int = -1

    @property
    def running_min(self):
        """(frame_index, ear) of the minimum in the current closed phase."""
        if self.phase != PHASE_CLOSED:
            return None
        s = self._closed[self._min_pos]
        return (s.frame_index, s.ear)

    def _emit_pending(self, end_frame, complete):
        cycle = BlinkCycle(
            video_id=self.video_id,
            blink_index=self.n_cycles,
            start_frame=self._p_start,
            min_frame=self._p_min_frame,
            min_ear=self._p_min_ear,
            reopen_frame=self._p_reopen,
            end_frame=end_frame,
            closed_samples=tuple(self._pending_closed),
            open_samples=tuple(self._pending_open),
            complete=complete,
        )
        self.n_cycles += 1
        self._has_pending = False
        self._pending_closed = []
        self._pending_open = []
        return CycleComplete(cycle)


def step(state: SegmenterState, sample: EarSample, profile):
    """Advance the state machine by one sample; returns (state, events).

    ``profile`` only needs th_low / th_high attributes.  The state is mutated
    in place and returned for convenience.
    """
    events = []
    if state.last_frame is not None:
        if sample.frame_index <= state.last_frame:
            raise StreamOrder(
                f"frame {sample.frame_index} after frame {state.last_frame}"
            )
        missing = sample.frame_index - state.last_frame - 1
        if missing > state.gap_tolerance:
            discarded = state.phase == PHASE_CLOSED
            if discarded:
                state.n_discarded += 1
                state._closed = []
            if state._has_pending:
                last_open = state._pending_open[-1]
                events.append(state._emit_pending(last_open.frame_index, False))
            state.phase = PHASE_OPEN
            state.n_gap_resets += 1
            events.append(GapReset(sample.frame_index, missing, discarded))
    state.last_frame = sample.frame_index
    state.n_samples += 1

    e = sample.ear
    if state.phase == PHASE_CLOSED:
        if e > profile.th_high:
            state._p_start = state._closed[0].frame_index
            m = state._closed[state._min_pos]
            state._p_min_frame = m.frame_index
            state._p_min_ear = m.ear
            state._p_reopen = sample.frame_index
            state._pending_closed = state._closed
            state._pending_open = [sample]
            state._has_pending = True
            state._closed = []
            state.phase = PHASE_OPEN
            events.append(Reopened(sample.frame_index))
        else:
            if e < state._closed[state._min_pos].ear:
                state._min_pos = len(state._closed)
            state._closed.append(sample)
    else:
        if e < profile.th_low:
            if state._has_pending:
                events.append(state._emit_pending(sample.frame_index - 1, True))
            state.phase = PHASE_CLOSED
            state._closed = [sample]
            state._min_pos = 0
            events.append(BlinkStart(sample.frame_index))
        elif state._has_pending:
            state._pending_open.append(sample)
    return state, events


def finish(state: SegmenterState):
    """Flush end-of-stream state; returns the trailing events.

    A reopened-but-unclosed cycle comes back flagged incomplete; a cycle that
    never reopened has no valid shape and is discarded (counted).
    """
    events = []
    if state.phase == PHASE_CLOSED:
        state.n_discarded += 1
        state._closed = []
        state.phase = PHASE_OPEN
    if state._has_pending:
        last_open = state._pending_open[-1]
        events.append(state._emit_pending(last_open.frame_index, False))
    return events


def segment(samples, profile, *, video_id="", gap_tolerance=None, with_stats=False):
    """Batch segmentation via the hot kernel.

    Produces exactly the cycles that folding :func:`step` plus :func:`finish`
    over the stream yields.  With ``with_stats`` the return value is
    (cycles, {"gap_resets": ..., "discarded_partials": ..., "n_samples": ...}).
    """
    samples = list(samples)
    if gap_tolerance is None:
        gap_tolerance = getattr(profile, "gap_tolerance", DEFAULT_GAP_TOLERANCE)
    if not samples:
        stats = {"gap_resets": 0, "discarded_partials": 0, "n_samples": 0}
        return ([], stats) if with_stats else []
    frames = np.fromiter((s.frame_index for s in samples), dtype=np.int64, count=len(samples))
    if np.any(np.diff(frames) <= 0):
        bad = int(np.flatnonzero(np.diff(frames) <= 0)[0]) + 1
        raise StreamOrder(f"frame {frames[bad]} after frame {frames[bad - 1]}")
    ears = np.fromiter((s.ear for s in samples), dtype=np.float64, count=len(samples))
    record, (n_resets, n_discarded) = kernels.segment_scan(
        frames, ears, profile.th_low, profile.th_high, gap_tolerance
    )
    cycles = []
    for j in range(len(record["start"])):
        a = int(record["start"][j])
        r = int(record["reopen"][j])
        last = int(record["open_last"][j])
        m = int(record["min"][j])
        cycles.append(
            BlinkCycle(
                video_id=video_id,
                blink_index=j,
                start_frame=int(frames[a]),
                min_frame=int(frames[m]),
                min_ear=float(ears[m]),
                reopen_frame=int(frames[r]),
                end_frame=int(record["end_frame"][j]),
                closed_samples=tuple(samples[a:r]),
                open_samples=tuple(samples[r : last + 1]),
                complete=bool(record["complete"][j]),
            )
        )
    if with_stats:
        stats = {
            "gap_resets": n_resets,
            "discarded_partials": n_discarded,
            "n_samples": len(samples),
        }
        return cycles, stats
    return cycles
