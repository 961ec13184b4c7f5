"""Synthetic EAR trace generator with exact ground truth.

Traces are a plateau at the open-eye EAR with V-shaped dips to the closed-eye
EAR, one per blink, plus optional seeded Gaussian noise.  A dip descends
linearly over its first half and ascends over the second; every dip sample
sits strictly below the plateau, and the dip minimum hits the closed value
exactly.  People blink roughly 10-15 times a minute for 100-400 ms each,
which is where the defaults come from.
"""

from dataclasses import dataclass

import numpy as np

from .ear import EarSample
from .errors import InvalidConfig


@dataclass(frozen=True)
class SynthConfig:
    fps: float = 30.0
    duration_s: float = 300.0
    blink_rate: float = 12.0  # blinks per minute
    blink_duration_ms: tuple = (100.0, 400.0)
    open_ear: float = 0.5
    closed_ear: float = 0.1
    noise_sd: float = 0.0
    seed: int = 0

    def validate(self):
        lo, hi = self.blink_duration_ms
        if self.fps <= 0 or self.duration_s <= 0:
            raise InvalidConfig("fps and duration_s must be positive")
        if self.blink_rate < 0:
            raise InvalidConfig("blink_rate must be non-negative")
        if not (0 < lo <= hi):
            raise InvalidConfig("blink_duration_ms must satisfy 0 < lo <= hi")
        if not (self.open_ear > self.closed_ear >= 0):
            raise InvalidConfig("need open_ear > closed_ear >= 0")
        if self.noise_sd < 0:
            raise InvalidConfig("noise_sd must be non-negative")


@dataclass(frozen=True)
class SynthBlink:
    """Noise-free extent of one generated dip (all frame indices inclusive)."""

    index: int
    start_frame: int
    min_frame: int
    end_frame: int


@dataclass(frozen=True)
class SynthTrace:
    config: SynthConfig
    samples: tuple  # EarSample per frame
    blinks: tuple  # SynthBlink ground truth


def dip_values(open_ear, closed_ear, n_down, n_up):
    """EAR values of one dip: n_down descending frames then n_up ascending.

    The last descending frame is the minimum and equals closed_ear exactly;
    every value is strictly below open_ear.
    """
    down = [
        open_ear + (closed_ear - open_ear) * (i + 1) / (n_down + 1.0)
        for i in range(n_down)
    ]
    down.append(closed_ear)
    up = [
        closed_ear + (open_ear - closed_ear) * j / (n_up + 1.0)
        for j in range(1, n_up + 1)
    ]
    return down + up


def generate(config: SynthConfig) -> SynthTrace:
    """Deterministic trace + ground truth for a config; same seed, same bytes."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    n_frames = int(round(config.fps * config.duration_s))
    if n_frames < 1:
        raise InvalidConfig("trace would be empty")
    n_blinks = int(round(config.blink_rate * config.duration_s / 60.0))
    values = np.full(n_frames, config.open_ear, dtype=np.float64)
    blinks = []
    lo, hi = config.blink_duration_ms
    for k in range(n_blinks):
        slot_start = int(np.floor(k * n_frames / n_blinks))
        slot_end = int(np.floor((k + 1) * n_frames / n_blinks))
        dur_ms = float(rng.uniform(lo, hi))
        d_frames = max(3, int(round(dur_ms / 1000.0 * config.fps)))
        # keep one plateau frame on each side of the dip inside its slot
        usable = slot_end - slot_start - 2
        if d_frames > usable:
            raise InvalidConfig(
                f"blink {k} needs {d_frames} frames but its slot has {usable}; "
                "lower the rate or shorten the blinks"
            )
        offset = int(rng.integers(0, usable - d_frames + 1))
        s = slot_start + 1 + offset
        n_down = (d_frames - 1) // 2
        n_up = d_frames - 1 - n_down
        vals = dip_values(config.open_ear, config.closed_ear, n_down, n_up)
        values[s : s + d_frames] = vals
        blinks.append(
            SynthBlink(
                index=k,
                start_frame=s,
                min_frame=s + n_down,
                end_frame=s + d_frames - 1,
            )
        )
    if config.noise_sd > 0:
        values = values + rng.normal(0.0, config.noise_sd, n_frames)
        np.maximum(values, 0.0, out=values)  # EAR is a non-negative ratio
    period_ms = 1000.0 / config.fps
    samples = tuple(
        EarSample(
            frame_index=i,
            t_ms=i * period_ms,
            ear_right=float(values[i]),
            ear_left=float(values[i]),
            ear=float(values[i]),
        )
        for i in range(n_frames)
    )
    return SynthTrace(config=config, samples=samples, blinks=tuple(blinks))
