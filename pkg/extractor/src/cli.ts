/**
 * extractor INPUT_VIDEO -o OUTPUT.jsonl [--manifest PATH] [--detector DIR]
 *           [--input-size N] [--min-confidence X]
 *
 * Converts a .y4m video into the blink pipeline's landmark JSONL.  Frames
 * with zero or multiple detected faces are dropped and counted in the
 * manifest.  Exit codes: 0 ok, 1 unreadable/invalid video, 2 bad usage,
 * 4 detector models missing.
 */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname } from "node:path";

import { DEFAULT_OPTIONS, DetectorMissingError, LandmarkDetector } from "./detector";
import { buildManifest, landmarkLine, sha256Hex } from "./manifest";
import { yuvToRgb } from "./convert";
import { frameTimeMs, parseY4m, Y4mError } from "./y4m";

interface CliArgs {
  input: string;
  output: string;
  manifest: string | null;
  detectorDir: string | null;
  inputSize: number;
  minConfidence: number;
}

const USAGE =
  "usage: extractor INPUT_VIDEO -o OUTPUT.jsonl [--manifest PATH] " +
  "[--detector DIR] [--input-size N] [--min-confidence X]";

export function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = {
    input: "",
    output: "",
    manifest: null,
    detectorDir: null,
    inputSize: DEFAULT_OPTIONS.inputSize,
    minConfidence: DEFAULT_OPTIONS.scoreThreshold,
  };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new Error(`${a} needs a value`);
      return argv[++i];
    };
    if (a === "-o" || a === "--output") args.output = next();
    else if (a === "--manifest") args.manifest = next();
    else if (a === "--detector") args.detectorDir = next();
    else if (a === "--input-size") args.inputSize = parseInt(next(), 10);
    else if (a === "--min-confidence") args.minConfidence = parseFloat(next());
    else if (a === "-h" || a === "--help") throw new Error(USAGE);
    else if (a.startsWith("-")) throw new Error(`unknown flag ${a}\n${USAGE}`);
    else if (!args.input) args.input = a;
    else throw new Error(`unexpected argument ${a}\n${USAGE}`);
  }
  if (!args.input || !args.output) throw new Error(USAGE);
  if (!(args.inputSize > 0) || args.inputSize % 32 !== 0) {
    throw new Error("--input-size must be a positive multiple of 32");
  }
  if (!(args.minConfidence > 0 && args.minConfidence < 1)) {
    throw new Error("--min-confidence must be in (0, 1)");
  }
  return args;
}

export async function run(argv: string[]): Promise<number> {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }

  let data: Uint8Array;
  try {
    data = readFileSync(args.input);
  } catch (err) {
    console.error(`cannot read ${args.input}: ${(err as Error).message}`);
    return 1;
  }
  let video;
  try {
    video = parseY4m(data);
  } catch (err) {
    if (err instanceof Y4mError) {
      console.error(`${args.input}: ${err.message} (the extractor reads .y4m video)`);
      return 1;
    }
    throw err;
  }

  let detector: LandmarkDetector;
  try {
    detector = await LandmarkDetector.load(args.detectorDir, {
      inputSize: args.inputSize,
      scoreThreshold: args.minConfidence,
    });
  } catch (err) {
    if (err instanceof DetectorMissingError) {
      console.error(`detector unavailable: ${err.message}`);
      return 4;
    }
    throw err;
  }

  const fps = video.fpsNum / video.fpsDen;
  const lines: string[] = [];
  let droppedNoFace = 0;
  let droppedMultiple = 0;
  for (let i = 0; i < video.frameCount; i++) {
    const rgb = yuvToRgb(video, video.frame(i));
    const result = await detector.detect(rgb, video.width, video.height);
    if (result.points === null) {
      if (result.faces === 0) droppedNoFace++;
      else droppedMultiple++;
      continue;
    }
    lines.push(landmarkLine(i, frameTimeMs(video, i), result.points));
  }

  const text = lines.length ? lines.join("\n") + "\n" : "";
  mkdirSync(dirname(args.output) || ".", { recursive: true });
  writeFileSync(args.output, text);

  const manifest = buildManifest({
    video: args.input,
    fps,
    frameCount: video.frameCount,
    framesWithFace: lines.length,
    droppedNoFace,
    droppedMultiple,
    detector: {
      id: detector.id,
      version: detector.version,
      input_size: args.inputSize,
      score_threshold: args.minConfidence,
      model_dir: detector.modelDir,
    },
    output: args.output,
    outputSha256: sha256Hex(text),
  });
  if (args.manifest) {
    mkdirSync(dirname(args.manifest) || ".", { recursive: true });
    writeFileSync(args.manifest, JSON.stringify(manifest, null, 2) + "\n");
  }
  for (const warning of manifest.warnings) console.error(`warning: ${warning}`);
  console.error(
    `${args.input}: ${video.frameCount} frames, ${lines.length} with a face, ` +
      `${manifest.frames_dropped} dropped -> ${args.output}`
  );
  return 0;
}

if (require.main === module) {
  run(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(err);
      process.exit(1);
    }
  );
}
