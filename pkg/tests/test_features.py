import dataclasses

import numpy as np
import pytest

from blinklab import (
    FeatureVector,
    IncompleteCycle,
    InvalidCalibration,
    calibrate,
    extract_features,
    segment,
    split_sets,
)
from blinklab.dataio import feature_csv_text

from helpers import make_profile, make_samples, random_cycle, square_wave_trace
from oracles import features_oracle

# two anchor blinks with hand-checked feature values
BLINK1 = FeatureVector(
    f1=3, f2=0.407, f3=0.53, f4=0.473, f5=-0.026,
    f6=158, f7=0.2469, f8=0.5289, f9=0.4798, f10=-0.0312,
    f11=2, f12=74, f13=137.8,
)
BLINK2_SET2 = (440, 990, -778.2)


def test_split_sets_blink1():
    set1, set2 = split_sets(BLINK1)
    assert set1 == (3, 0.407, 0.53, 0.473, -0.026, 158, 0.2469, 0.5289, 0.4798, -0.0312)
    assert set2 == (2, 74, 137.8)


def test_split_sets_partition_identity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = dataclasses.replace(
            BLINK1, **{f"f{i}": float(rng.uniform()) for i in (2, 3, 4, 5, 7, 8, 9, 10, 13)}
        )
        set1, set2 = split_sets(v)
        assert set1 + set2 == v.values()


def test_reopen_difference_anchor():
    # the single reopen baseline consistent with both anchor blinks is 211.8
    profile = make_profile(0.3, 0.5, ref_reopen=211.8)
    cyc74 = make_cycle_with_reopen(74)
    cyc990 = make_cycle_with_reopen(990)
    assert extract_features(cyc74, profile).f13 == 137.8
    assert extract_features(cyc990, profile).f13 == -778.2


def make_cycle_with_reopen(n_reopen, n_close=2, n_open=3):
    # closed region: n_close descending frames, then the min, then filler up
    closed = [0.3 - 0.01 * i for i in range(n_close)] + [0.1] + [0.2] * (n_reopen - 1)
    open_ = [0.55] * n_open
    samples = make_samples(closed + open_)
    return segment_like_cycle(samples, len(closed))


def segment_like_cycle(samples, n_closed):
    from blinklab.segmenter import BlinkCycle

    closed = tuple(samples[:n_closed])
    open_ = tuple(samples[n_closed:])
    ears = [s.ear for s in closed]
    min_pos = int(np.argmin(ears))
    return BlinkCycle(
        video_id="t",
        blink_index=0,
        start_frame=closed[0].frame_index,
        min_frame=closed[min_pos].frame_index,
        min_ear=ears[min_pos],
        reopen_frame=open_[0].frame_index,
        end_frame=open_[-1].frame_index,
        closed_samples=closed,
        open_samples=open_,
        complete=True,
    )


def test_constant_open_region():
    profile = make_profile(0.3, 0.5, ref_open=0.5, ref_reopen=10)
    samples = make_samples([0.3, 0.1, 0.2] + [0.5] * 4)
    cycle = segment_like_cycle(samples, 3)
    v = extract_features(cycle, profile)
    assert (v.f2, v.f3, v.f4) == (0.5, 0.5, 0.5)
    assert v.f5 == 0.0


def test_random_cycles_match_straight_line_oracle():
    rng = np.random.default_rng(42)
    profile = make_profile(0.3, 0.5, ref_open=0.48, ref_close=0.22, ref_reopen=12.5)
    for _ in range(200):
        cycle = random_cycle(rng)
        got = extract_features(cycle, profile).values()
        want = features_oracle(cycle, profile)
        assert got[0] == want[0] and got[5] == want[5]
        assert got[10] == want[10] and got[11] == want[11]
        for g, w in zip(got, want):
            assert g == pytest.approx(w, abs=1e-12)


def test_region_structure_invariants():
    rng = np.random.default_rng(3)
    profile = make_profile(0.3, 0.5)
    for _ in range(50):
        v = extract_features(random_cycle(rng), profile)
        assert v.f2 <= v.f4 <= v.f3
        assert v.f7 <= v.f9 <= v.f8
        assert v.f1 >= 1 and v.f6 >= 1
        assert v.f11 >= 0 and v.f12 >= 1
        assert v.f11 + v.f12 == v.f6
        assert v.f13 + v.f12 == profile.ref_reopen_mean


def test_f7_equals_cycle_min():
    rng = np.random.default_rng(4)
    profile = make_profile(0.3, 0.5)
    for _ in range(20):
        cycle = random_cycle(rng)
        assert extract_features(cycle, profile).f7 == cycle.min_ear


def test_stats_invariant_under_region_permutation():
    rng = np.random.default_rng(5)
    profile = make_profile(0.3, 0.5)
    cycle = random_cycle(rng)
    v = extract_features(cycle, profile)
    perm_closed = list(cycle.closed_samples)
    rng.shuffle(perm_closed)
    perm_closed = [
        dataclasses.replace(s, frame_index=c.frame_index, t_ms=c.t_ms)
        for s, c in zip(perm_closed, cycle.closed_samples)
    ]
    perm_open = list(cycle.open_samples)
    rng.shuffle(perm_open)
    perm_open = [
        dataclasses.replace(s, frame_index=c.frame_index, t_ms=c.t_ms)
        for s, c in zip(perm_open, cycle.open_samples)
    ]
    ears = [s.ear for s in perm_closed]
    min_pos = int(np.argmin(ears))
    shuffled = dataclasses.replace(
        cycle,
        closed_samples=tuple(perm_closed),
        open_samples=tuple(perm_open),
        min_frame=perm_closed[min_pos].frame_index,
        min_ear=ears[min_pos],
    )
    w = extract_features(shuffled, profile)
    for name in ("f2", "f3", "f7", "f8"):
        assert getattr(w, name) == getattr(v, name)
    assert w.f4 == pytest.approx(v.f4, abs=1e-12)
    assert w.f9 == pytest.approx(v.f9, abs=1e-12)


def test_calibration_cycle_differences_average_to_zero():
    # over the calibration window itself, f5 and f10 must be centered on 0
    rng = np.random.default_rng(6)
    dips = []
    for _ in range(10):
        depth = rng.uniform(0.02, 0.1)
        width = int(rng.integers(6, 14))
        dips.append([depth + 0.01 * (i % 3) for i in range(width)])
    ears = []
    for dip in dips:
        ears.extend([0.5 + 0.002 * (i % 5) for i in range(12)])
        ears.extend(dip)
    ears.extend([0.5] * 12)
    ears.append(0.05)  # trailing start completes the final cycle
    ears.append(0.5)
    samples = make_samples(ears)
    window_ms = samples[-1].t_ms - samples[0].t_ms
    profile = calibrate(samples, window_ms=window_ms)
    cycles = [c for c in segment(samples[:-1], profile) if c.complete]
    assert len(cycles) == profile.n_calibration_blinks
    vs = [extract_features(c, profile) for c in cycles]
    assert np.mean([v.f5 for v in vs]) == pytest.approx(0.0, abs=1e-9)
    assert np.mean([v.f10 for v in vs]) == pytest.approx(0.0, abs=1e-9)
    assert np.mean([v.f13 for v in vs]) == pytest.approx(0.0, abs=1e-9)


def test_incomplete_cycle_rejected_unless_opted_in():
    profile = make_profile(0.4, 0.6, ref_reopen=5.0)
    samples = make_samples([0.5, 0.2, 0.65, 0.5])
    (cycle,) = segment(samples, profile)
    assert not cycle.complete
    with pytest.raises(IncompleteCycle):
        extract_features(cycle, profile)
    v = extract_features(cycle, profile, allow_incomplete=True)
    assert v.f1 == 2  # the truncated open region
    assert v.f6 == 1


def test_profile_without_baselines_rejected():
    import math

    profile = dataclasses.replace(make_profile(0.4, 0.6), ref_reopen_mean=math.nan)
    rng = np.random.default_rng(0)
    with pytest.raises(InvalidCalibration):
        extract_features(random_cycle(rng), profile)


def test_feature_csv_round_trip_layout():
    v = dataclasses.replace(BLINK1, label=1, video_id="v1", blink_index=4)
    text = feature_csv_text([v], "all")
    lines = text.strip().split("\n")
    assert lines[0].startswith("video_id,blink_index,f1,")
    assert lines[0].endswith(",f13,label")
    cells = lines[1].split(",")
    assert cells[0] == "v1" and cells[1] == "4"
    assert cells[2] == "3" and cells[7] == "158"  # counts stay integers
    assert cells[-1] == "1"
    set1_text = feature_csv_text([v], "set1")
    assert set1_text.strip().split("\n")[0].endswith(",f10,label")
