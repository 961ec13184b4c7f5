import numpy as np
import pytest

from blinklab import (
    BlinkStart,
    CycleComplete,
    GapReset,
    Reopened,
    SegmenterState,
    StreamOrder,
    finish,
    segment,
    step,
)
from blinklab.dataio import cycle_csv_text

from helpers import make_profile, make_samples
from oracles import cycles_match, segment_oracle

PROFILE = make_profile(0.4, 0.6)


def stream_cycles(samples, profile, gap_tolerance=5):
    """Fold step + finish over the samples; return (cycles, events)."""
    state = SegmenterState(gap_tolerance=gap_tolerance)
    events = []
    for s in samples:
        _, evs = step(state, s, profile)
        events.extend(evs)
    events.extend(finish(state))
    cycles = [e.cycle for e in events if isinstance(e, CycleComplete)]
    return cycles, events, state


def test_no_crossings_no_events():
    samples = make_samples([0.5, 0.5, 0.5])
    _, events, state = stream_cycles(samples, PROFILE)
    assert events == []
    assert state.phase == "OPEN"
    assert segment(samples, PROFILE) == []


def test_hand_traced_cycle():
    samples = make_samples([0.5, 0.35, 0.2, 0.45, 0.65, 0.5, 0.35])
    cycles, events, _ = stream_cycles(samples, PROFILE)
    kinds = [type(e) for e in events]
    assert kinds == [BlinkStart, Reopened, CycleComplete, BlinkStart]
    assert events[0].frame_index == 1
    assert events[1].frame_index == 4
    (c,) = cycles
    assert (c.start_frame, c.min_frame, c.reopen_frame, c.end_frame) == (1, 2, 4, 5)
    assert c.min_ear == 0.2
    assert c.complete
    assert [s.frame_index for s in c.closed_samples] == [1, 2, 3]
    assert [s.frame_index for s in c.open_samples] == [4, 5]


def test_hysteresis_partial_recovery_is_one_cycle():
    # 0.55 never reaches th_high, so the closed phase persists through it
    samples = make_samples([0.5, 0.35, 0.55, 0.35, 0.65])
    cycles = segment(samples, PROFILE)
    assert len(cycles) == 1
    c = cycles[0]
    assert (c.start_frame, c.reopen_frame, c.complete) == (1, 4, False)


def test_equality_at_thresholds_keeps_phase():
    # exactly th_low while open: no start; exactly th_high while closed: no reopen
    samples = make_samples([0.5, 0.4, 0.5, 0.35, 0.6, 0.65, 0.5])
    cycles, events, _ = stream_cycles(samples, PROFILE)
    starts = [e for e in events if isinstance(e, BlinkStart)]
    assert [e.frame_index for e in starts] == [3]
    assert cycles[0].reopen_frame == 5


def test_min_tie_breaks_to_earliest_frame():
    samples = make_samples([0.5, 0.2, 0.3, 0.2, 0.65, 0.5])
    cycles = segment(samples, PROFILE)
    assert cycles[0].min_frame == 1


def test_k_dips_give_k_minus_1_complete():
    ears = []
    for _ in range(6):
        ears.extend([0.5, 0.5, 0.2, 0.2, 0.65, 0.5])
    samples = make_samples(ears)
    cycles = segment(samples, PROFILE)
    assert len(cycles) == 6
    assert sum(c.complete for c in cycles) == 5
    assert [c.blink_index for c in cycles] == list(range(6))


def test_stream_order_enforced():
    state = SegmenterState()
    step(state, make_samples([0.5])[0], PROFILE)
    with pytest.raises(StreamOrder):
        step(state, make_samples([0.5])[0], PROFILE)
    bad = make_samples([0.5, 0.5], frames=[4, 2])
    with pytest.raises(StreamOrder):
        segment(bad, PROFILE)


def test_gap_reset_discards_partial_and_counts():
    # blink starts, then a 10-frame hole: partial discarded, state reopens
    samples = make_samples([0.5, 0.2, 0.2], frames=[0, 1, 2])
    samples += make_samples([0.5, 0.5], frames=[13, 14])
    cycles, events, state = stream_cycles(samples, PROFILE)
    resets = [e for e in events if isinstance(e, GapReset)]
    assert len(resets) == 1
    assert resets[0].missing == 10
    assert resets[0].discarded_partial
    assert cycles == []
    assert state.n_discarded == 1
    assert state.n_gap_resets == 1


def test_gap_reset_flushes_pending_as_incomplete():
    samples = make_samples([0.5, 0.2, 0.65, 0.5], frames=[0, 1, 2, 3])
    samples += make_samples([0.5, 0.2, 0.65, 0.5], frames=[20, 21, 22, 23])
    cycles, events, _ = stream_cycles(samples, PROFILE)
    assert len(cycles) == 2
    assert not cycles[0].complete
    assert cycles[0].end_frame == 3  # open region truncated at the gap
    assert not cycles[1].complete
    # batch agrees
    assert segment(samples, PROFILE, gap_tolerance=5) == cycles


def test_gap_within_tolerance_does_not_reset():
    samples = make_samples([0.5, 0.2], frames=[0, 1])
    samples += make_samples([0.65, 0.5, 0.2], frames=[6, 7, 8])  # 4 missing <= 5
    cycles, events, _ = stream_cycles(samples, PROFILE)
    assert not any(isinstance(e, GapReset) for e in events)
    assert len(cycles) == 1
    assert cycles[0].complete
    assert cycles[0].end_frame == 7


def test_concatenation_across_reset_is_union():
    a = make_samples([0.5, 0.2, 0.65, 0.5, 0.2, 0.7, 0.5], frames=range(7))
    b = make_samples([0.5, 0.2, 0.65, 0.5], frames=range(100, 104))
    combined = segment(a + b, PROFILE)
    alone_a = segment(a, PROFILE)
    alone_b = segment(b, PROFILE)
    assert len(combined) == len(alone_a) + len(alone_b)
    for got, ref in zip(combined, alone_a + alone_b):
        assert (got.start_frame, got.min_frame, got.reopen_frame, got.end_frame) == (
            ref.start_frame,
            ref.min_frame,
            ref.reopen_frame,
            ref.end_frame,
        )
        assert got.complete == ref.complete


def random_walk_samples(rng, n=300, gappy=False):
    ear = np.clip(0.5 + np.cumsum(rng.normal(0, 0.08, n)), 0.0, 1.2)
    if gappy:
        frames = np.cumsum(rng.choice([1, 1, 1, 1, 2, 9], size=n))
    else:
        frames = np.arange(n)
    return make_samples(ear, frames=list(int(f) for f in frames))


@pytest.mark.parametrize("gappy", [False, True])
def test_random_walks_match_oracle_and_streaming(gappy):
    rng = np.random.default_rng(123 if gappy else 321)
    for _ in range(100):
        samples = random_walk_samples(rng, gappy=gappy)
        frames = [s.frame_index for s in samples]
        ears = [s.ear for s in samples]
        batch = segment(samples, PROFILE)
        streamed, _, state = stream_cycles(samples, PROFILE)
        assert batch == streamed
        oracle, n_resets, n_discarded = segment_oracle(
            frames, ears, PROFILE.th_low, PROFILE.th_high, 5
        )
        assert cycles_match(batch, oracle, frames)
        assert state.n_gap_resets == n_resets
        assert state.n_discarded == n_discarded


def test_running_min_exposed_only_while_closed():
    state = SegmenterState()
    s = make_samples([0.5, 0.2, 0.1])
    step(state, s[0], PROFILE)
    assert state.running_min is None
    step(state, s[1], PROFILE)
    assert state.running_min == (1, 0.2)
    step(state, s[2], PROFILE)
    assert state.running_min == (2, 0.1)


def test_cycle_invariants_hold():
    rng = np.random.default_rng(5)
    for _ in range(20):
        samples = random_walk_samples(rng)
        for c in segment(samples, PROFILE):
            assert c.start_frame <= c.min_frame < c.reopen_frame <= c.end_frame
            assert c.closed_samples
            assert all(c.min_ear <= s.ear for s in c.closed_samples)
            if c.complete:
                assert c.open_samples


def test_cycle_dump_layout():
    samples = make_samples([0.5, 0.35, 0.2, 0.45, 0.65, 0.5, 0.35, 0.2, 0.7, 0.5])
    cycles = segment(samples, PROFILE, video_id="demo")
    text = cycle_csv_text(cycles)
    lines = text.strip().split("\n")
    assert lines[0] == "video_id,blink_index,start_frame,min_frame,reopen_frame,end_frame,min_ear,complete"
    assert lines[1] == "demo,0,1,2,4,5,0.20000000000000001,1"
