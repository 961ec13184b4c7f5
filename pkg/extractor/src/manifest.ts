/**
 * Landmark JSONL line formatting and the extraction manifest.
 *
 * One JSONL line per frame with exactly one detected face:
 *   {"frame": <int>, "t_ms": <float>, "pts": [[x, y] x 68]}
 * matching the blink pipeline's landmark schema (array index i = landmark
 * point i+1 of the 68-point numbering).
 */

import { createHash } from "node:crypto";

export const LANDMARK_COUNT = 68;

export interface ExtractionManifest {
  schema_version: 1;
  video: string;
  fps: number;
  frame_count: number;
  frames_with_face: number;
  frames_dropped: number;
  dropped_no_face: number;
  dropped_multiple_faces: number;
  detector: {
    id: string;
    version: string;
    input_size: number;
    score_threshold: number;
    model_dir: string;
  };
  output: string;
  output_sha256: string;
  warnings: string[];
}

export function landmarkLine(frame: number, tMs: number, pts: [number, number][]): string {
  if (pts.length !== LANDMARK_COUNT) {
    throw new Error(`expected ${LANDMARK_COUNT} points, got ${pts.length}`);
  }
  const pairs = pts.map(([x, y]) => `[${JSON.stringify(x)}, ${JSON.stringify(y)}]`).join(", ");
  return `{"frame": ${frame}, "t_ms": ${JSON.stringify(tMs)}, "pts": [${pairs}]}`;
}

export function sha256Hex(data: string | Uint8Array): string {
  return createHash("sha256").update(data).digest("hex");
}

export function buildManifest(args: {
  video: string;
  fps: number;
  frameCount: number;
  framesWithFace: number;
  droppedNoFace: number;
  droppedMultiple: number;
  detector: ExtractionManifest["detector"];
  output: string;
  outputSha256: string;
}): ExtractionManifest {
  const dropped = args.droppedNoFace + args.droppedMultiple;
  const warnings: string[] = [];
  if (args.frameCount > 0 && dropped > args.frameCount / 2) {
    warnings.push(
      `more than half the frames were dropped (${dropped}/${args.frameCount}); ` +
        "check lighting, occlusion, or detector thresholds"
    );
  }
  return {
    schema_version: 1,
    video: args.video,
    fps: args.fps,
    frame_count: args.frameCount,
    frames_with_face: args.framesWithFace,
    frames_dropped: dropped,
    dropped_no_face: args.droppedNoFace,
    dropped_multiple_faces: args.droppedMultiple,
    detector: args.detector,
    output: args.output,
    output_sha256: args.outputSha256,
    warnings,
  };
}
