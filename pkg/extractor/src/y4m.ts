/**
 * Minimal YUV4MPEG2 (.y4m) demuxer.
 *
 * Y4M is an uncompressed container: a text header line, then one
 * "FRAME\n" marker plus raw planar YUV data per frame, which makes it the
 * one video format that needs no codec. Supported colorspaces: the C420
 * family (all treated as 2x2 chroma subsampling) and C444.
 */

export interface Y4mVideo {
  width: number;
  height: number;
  fpsNum: number;
  fpsDen: number;
  colorspace: string;
  frameCount: number;
  /** raw planar YUV bytes of frame i */
  frame(i: number): Uint8Array;
}

const MAGIC = "YUV4MPEG2";

export class Y4mError extends Error {}

function frameSize(width: number, height: number, colorspace: string): number {
  const luma = width * height;
  if (colorspace.startsWith("C420") || colorspace === "") {
    if (width % 2 !== 0 || height % 2 !== 0) {
      throw new Y4mError(`4:2:0 needs even dimensions, got ${width}x${height}`);
    }
    return luma + luma / 2;
  }
  if (colorspace === "C444") return luma * 3;
  throw new Y4mError(`unsupported colorspace ${colorspace}`);
}

export function parseY4m(data: Uint8Array): Y4mVideo {
  const headerEnd = data.indexOf(0x0a);
  if (headerEnd < 0) throw new Y4mError("missing header line");
  const header = Buffer.from(data.subarray(0, headerEnd)).toString("ascii");
  const fields = header.split(" ");
  if (fields[0] !== MAGIC) throw new Y4mError(`not a YUV4MPEG2 stream (got "${fields[0]}")`);

  let width = 0;
  let height = 0;
  let fpsNum = 0;
  let fpsDen = 0;
  let colorspace = "C420jpeg"; // the format's default when C is absent
  for (const field of fields.slice(1)) {
    const tag = field[0];
    const value = field.slice(1);
    if (tag === "W") width = parseInt(value, 10);
    else if (tag === "H") height = parseInt(value, 10);
    else if (tag === "F") {
      const [n, d] = value.split(":");
      fpsNum = parseInt(n, 10);
      fpsDen = parseInt(d, 10);
    } else if (tag === "C") colorspace = field;
    // I (interlacing), A (aspect), X (extensions) don't affect decoding
  }
  if (!(width > 0) || !(height > 0)) throw new Y4mError(`bad dimensions ${width}x${height}`);
  if (!(fpsNum > 0) || !(fpsDen > 0)) throw new Y4mError("missing or bad frame rate");

  const bytesPerFrame = frameSize(width, height, colorspace);
  const offsets: number[] = [];
  let pos = headerEnd + 1;
  while (pos < data.length) {
    const lineEnd = data.indexOf(0x0a, pos);
    if (lineEnd < 0) throw new Y4mError(`truncated FRAME marker at byte ${pos}`);
    const marker = Buffer.from(data.subarray(pos, lineEnd)).toString("ascii");
    if (!marker.startsWith("FRAME")) {
      throw new Y4mError(`expected FRAME marker at byte ${pos}, got "${marker.slice(0, 16)}"`);
    }
    const start = lineEnd + 1;
    if (start + bytesPerFrame > data.length) {
      throw new Y4mError(`truncated frame ${offsets.length}`);
    }
    offsets.push(start);
    pos = start + bytesPerFrame;
  }

  return {
    width,
    height,
    fpsNum,
    fpsDen,
    colorspace,
    frameCount: offsets.length,
    frame: (i: number) => data.subarray(offsets[i], offsets[i] + bytesPerFrame),
  };
}

/** Milliseconds of frame i at the container frame rate. */
export function frameTimeMs(video: Pick<Y4mVideo, "fpsNum" | "fpsDen">, i: number): number {
  return (i * 1000 * video.fpsDen) / video.fpsNum;
}
