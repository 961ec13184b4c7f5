/**
 * Pretrained 68-point facial landmark detection (TinyFaceDetector + the
 * 68-point landmark net), running on the pure-JS tfjs CPU backend with
 * weights read from disk. `fetch` is rerouted to the filesystem before the
 * models load, so nothing can touch the network at runtime.
 */

import { readFileSync, existsSync } from "node:fs";
import { join } from "node:path";

import * as faceapi from "@vladmandic/face-api/dist/face-api.esm-nobundle.js";

// the slice of tfjs this module touches, via face-api's re-export so the
// bundle carries exactly one tfjs instance
interface TfSlice {
  setBackend(name: string): Promise<boolean>;
  ready(): Promise<void>;
  tensor3d(
    values: Uint8Array,
    shape: [number, number, number],
    dtype: "int32"
  ): { dispose(): void };
}

const tf = faceapi.tf as unknown as TfSlice;

export interface DetectorOptions {
  inputSize: number; // TinyFaceDetector input resolution (multiple of 32)
  scoreThreshold: number;
}

export const DEFAULT_OPTIONS: DetectorOptions = { inputSize: 320, scoreThreshold: 0.5 };

export interface FrameDetection {
  faces: number;
  /** 68 [x, y] pairs in source-image pixels when exactly one face was found */
  points: [number, number][] | null;
}

export class DetectorMissingError extends Error {}

function fileFetch(url: string | URL): Promise<Response> {
  const buf = readFileSync(String(url));
  return Promise.resolve({
    ok: true,
    status: 200,
    json: async () => JSON.parse(buf.toString("utf-8")),
    arrayBuffer: async () => buf.buffer.slice(buf.byteOffset, buf.byteOffset + buf.byteLength),
  } as unknown as Response);
}

/** The model directory bundled with the face-api dependency, if present. */
export function bundledModelDir(): string | null {
  const candidates: string[] = [];
  try {
    candidates.push(join(require.resolve("@vladmandic/face-api/package.json"), "..", "model"));
  } catch {
    // bundled build: resolve relative to the emitted file instead
  }
  candidates.push(join(__dirname, "..", "node_modules", "@vladmandic", "face-api", "model"));
  for (const dir of candidates) {
    if (existsSync(join(dir, "face_landmark_68_model-weights_manifest.json"))) return dir;
  }
  return null;
}

export class LandmarkDetector {
  readonly id = "tiny_face_detector+face_landmark_68";
  readonly version: string = faceapi.version;
  private readonly options: faceapi.TinyFaceDetectorOptions;

  private constructor(readonly config: DetectorOptions, readonly modelDir: string) {
    this.options = new faceapi.TinyFaceDetectorOptions({
      inputSize: config.inputSize,
      scoreThreshold: config.scoreThreshold,
    });
  }

  static async load(modelDir: string | null, config: DetectorOptions = DEFAULT_OPTIONS): Promise<LandmarkDetector> {
    const dir = modelDir ?? bundledModelDir();
    if (dir === null || !existsSync(join(dir, "face_landmark_68_model-weights_manifest.json"))) {
      throw new DetectorMissingError(
        `no 68-point landmark model under ${dir ?? "(no model directory found)"}`
      );
    }
    faceapi.env.monkeyPatch({ fetch: fileFetch as typeof fetch });
    (globalThis as { fetch: unknown }).fetch = fileFetch; // filesystem-only runtime
    await tf.setBackend("cpu");
    await tf.ready();
    await faceapi.nets.tinyFaceDetector.loadFromUri(dir);
    await faceapi.nets.faceLandmark68Net.loadFromUri(dir);
    return new LandmarkDetector(config, dir);
  }

  async detect(rgb: Uint8Array, width: number, height: number): Promise<FrameDetection> {
    const tensor = tf.tensor3d(rgb, [height, width, 3], "int32");
    try {
      const results = await faceapi
        .detectAllFaces(tensor as unknown as faceapi.TNetInput, this.options)
        .withFaceLandmarks();
      if (results.length !== 1) return { faces: results.length, points: null };
      const points = results[0].landmarks.positions.map(
        (p): [number, number] => [p.x, p.y]
      );
      return { faces: 1, points };
    } finally {
      tensor.dispose();
    }
  }
}
