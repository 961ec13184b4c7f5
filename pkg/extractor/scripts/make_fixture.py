#!/usr/bin/env python3
"""Regenerate the bundled .y4m test clips.

face.y4m: 3 s at 10 fps of a real face photograph (scikit-image's astronaut
sample) with small per-frame shifts, so the detector sees one face in every
frame.  noface.y4m: a deterministic gradient with no face at all.  Both are
committed; rerun this only when the fixtures need to change.
"""

import os

import numpy as np
from skimage import data, transform

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "fixtures")


def rgb_to_yuv420(rgb):
    """BT.601 limited-range planar 4:2:0; inverse of the extractor's decoder."""
    r = rgb[:, :, 0].astype(np.float64)
    g = rgb[:, :, 1].astype(np.float64)
    b = rgb[:, :, 2].astype(np.float64)
    y = 16 + (65.738 * r + 129.057 * g + 25.064 * b) / 256
    u = 128 + (-37.945 * r - 74.494 * g + 112.439 * b) / 256
    v = 128 + (112.439 * r - 94.154 * g - 18.285 * b) / 256

    def q(x):
        return np.clip(np.round(x), 0, 255).astype(np.uint8)

    def sub(c):
        h, w = c.shape
        return q((c[0:h:2, 0:w:2] + c[0:h:2, 1:w:2] + c[1:h:2, 0:w:2] + c[1:h:2, 1:w:2]) / 4)

    return q(y), sub(u), sub(v)


def write_y4m(path, frames_rgb, fps_num, fps_den):
    h, w = frames_rgb[0].shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"YUV4MPEG2 W{w} H{h} F{fps_num}:{fps_den} Ip A1:1 C420jpeg\n".encode())
        for rgb in frames_rgb:
            y, u, v = rgb_to_yuv420(rgb)
            fh.write(b"FRAME\n")
            fh.write(y.tobytes())
            fh.write(u.tobytes())
            fh.write(v.tobytes())


def face_clip(n_frames=30, width=320, height=240):
    base = data.astronaut()  # 512x512 RGB photo with one face
    small = transform.resize(base, (height, width), anti_aliasing=True)
    small = (small * 255).round().astype(np.uint8)
    rng = np.random.default_rng(0)
    frames = []
    for _ in range(n_frames):
        dx = int(rng.integers(-2, 3))
        dy = int(rng.integers(-2, 3))
        frames.append(np.roll(small, (dy, dx), axis=(0, 1)))
    return frames


def twofaces_clip(n_frames=4):
    base = data.astronaut()
    small = (transform.resize(base, (256, 256), anti_aliasing=True) * 255).round().astype(np.uint8)
    two = np.concatenate([small, small], axis=1)
    return [two.copy() for _ in range(n_frames)]


def noface_clip(n_frames=6, width=160, height=120):
    yy, xx = np.mgrid[0:height, 0:width]
    frames = []
    for k in range(n_frames):
        rgb = np.stack(
            [
                (xx * 255 // width).astype(np.uint8),
                (yy * 255 // height).astype(np.uint8),
                np.full((height, width), (40 * k) % 255, dtype=np.uint8),
            ],
            axis=2,
        )
        frames.append(rgb)
    return frames


def main():
    os.makedirs(FIXTURES, exist_ok=True)
    face_path = os.path.join(FIXTURES, "face.y4m")
    write_y4m(face_path, face_clip(), 10, 1)
    print(f"wrote {face_path} ({os.path.getsize(face_path)} bytes)")
    noface_path = os.path.join(FIXTURES, "noface.y4m")
    write_y4m(noface_path, noface_clip(), 10, 1)
    print(f"wrote {noface_path} ({os.path.getsize(noface_path)} bytes)")
    two_path = os.path.join(FIXTURES, "twofaces.y4m")
    write_y4m(two_path, twofaces_clip(), 10, 1)
    print(f"wrote {two_path} ({os.path.getsize(two_path)} bytes)")


if __name__ == "__main__":
    main()
