/**
 * Planar YUV -> interleaved RGB, BT.601 limited range.
 *
 * Integer arithmetic only, so decoding is bit-reproducible across runs and
 * platforms (the extractor promises byte-identical output for a fixed
 * detector).
 */

function clamp8(v: number): number {
  return v < 0 ? 0 : v > 255 ? 255 : v;
}

export function yuvToRgb(video: { width: number; height: number; colorspace: string }, plane: Uint8Array): Uint8Array {
  const { width, height, colorspace } = video;
  const luma = width * height;
  const subsampled = colorspace !== "C444";
  const cw = subsampled ? width / 2 : width;
  const u = plane.subarray(luma, luma + (subsampled ? luma / 4 : luma));
  const v = plane.subarray(luma + (subsampled ? luma / 4 : luma));

  const rgb = new Uint8Array(width * height * 3);
  for (let y = 0; y < height; y++) {
    const cy = subsampled ? y >> 1 : y;
    for (let x = 0; x < width; x++) {
      const cx = subsampled ? x >> 1 : x;
      const c = plane[y * width + x] - 16;
      const d = u[cy * cw + cx] - 128;
      const e = v[cy * cw + cx] - 128;
      const i = (y * width + x) * 3;
      rgb[i] = clamp8((298 * c + 409 * e + 128) >> 8);
      rgb[i + 1] = clamp8((298 * c - 100 * d - 208 * e + 128) >> 8);
      rgb[i + 2] = clamp8((298 * c + 516 * d + 128) >> 8);
    }
  }
  return rgb;
}
