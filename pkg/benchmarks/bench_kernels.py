"""Benchmark the numba kernels against the pure-numpy/python fallback.

Usage::

    python -m benchmarks.bench_kernels
    python -m benchmarks.bench_kernels --frames 108000 --repeats 7

The jitted path is whatever `blinklab.kernels` selected at import time, so
run without BLINKLAB_DISABLE_NUMBA to get a real comparison; with the flag
set both columns time the fallback.
"""

import argparse
import json
import time
from pathlib import Path

import numpy as np

from blinklab import kernels

RESULTS_DIR = Path(__file__).parent / "results"


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_ear(n_frames, repeats):
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 640, size=(n_frames, 68, 2))
    out = np.empty((n_frames, 3))
    status = np.empty(n_frames, dtype=np.uint8)

    def fast():
        kernels.ear_batch(pts, 1e-9)

    def slow():
        kernels.ear_batch_fallback(pts, 1e-9, out, status)

    fast()  # compile once outside the timer
    return best_of(fast, repeats), best_of(slow, repeats)


def bench_segment(n_frames, repeats):
    rng = np.random.default_rng(1)
    ears = np.clip(0.5 + np.cumsum(rng.normal(0, 0.05, n_frames)), 0.0, 1.2)
    frames = np.arange(n_frames, dtype=np.int64)
    cap = n_frames // 2 + 1
    outs = [np.empty(cap, dtype=np.int64) for _ in range(5)]
    comp = np.empty(cap, dtype=np.uint8)

    def fast():
        kernels.segment_scan(frames, ears, 0.3, 0.5, 5)

    def slow():
        kernels.segment_scan_fallback(
            frames, ears, 0.3, 0.5, 5, outs[0], outs[1], outs[2], outs[3], outs[4], comp
        )

    fast()
    return best_of(fast, repeats), best_of(slow, repeats)


def bench_split(n_rows, repeats):
    rng = np.random.default_rng(2)
    values = np.sort(rng.normal(size=n_rows))
    labels = rng.integers(0, 2, size=n_rows).astype(np.int64)

    def fast():
        kernels.split_scan(values, labels, 1)

    def slow():
        kernels.split_scan_fallback(values, labels, 1)

    fast()
    return best_of(fast, repeats), best_of(slow, repeats)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--frames", type=int, default=27000, help="15 min at 30 fps")
    parser.add_argument("--split-rows", type=int, default=100_000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--json-out", help="also write results as JSON")
    args = parser.parse_args()

    rows = [
        ("ear_batch", *bench_ear(args.frames, args.repeats), args.frames),
        ("segment_scan", *bench_segment(args.frames, args.repeats), args.frames),
        ("split_scan", *bench_split(args.split_rows, args.repeats), args.split_rows),
    ]

    mode = "numba" if kernels.NUMBA_ENABLED else "fallback (numba disabled)"
    print(f"kernel path under test: {mode}")
    print(f"{'kernel':14s} {'size':>8s} {'jit (ms)':>10s} {'fallback (ms)':>14s} {'speedup':>8s}")
    results = []
    for name, fast, slow, size in rows:
        speedup = slow / fast if fast > 0 else float("inf")
        print(f"{name:14s} {size:8d} {fast * 1e3:10.2f} {slow * 1e3:14.2f} {speedup:7.1f}x")
        results.append(
            {"kernel": name, "size": size, "jit_s": fast, "fallback_s": slow, "speedup": speedup}
        )

    if args.json_out:
        RESULTS_DIR.mkdir(parents=True, exist_ok=True)
        path = args.json_out if args.json_out != "auto" else RESULTS_DIR / "kernels.json"
        Path(path).write_text(json.dumps({"mode": mode, "results": results}, indent=2))
        print(f"results saved to {path}")


if __name__ == "__main__":
    main()
