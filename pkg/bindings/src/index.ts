/**
 * Array-buffer bindings for the hazemix augmentation toolkit.
 *
 * Three entry points for training pipelines: `estimate_density`,
 * `estimate_airlight` and `damix_augment`, all over plain contiguous
 * `Uint8Array` image buffers. Everything is delegated to the `hazemix` CLI
 * through its public file formats (PNG images, density sidecar JSON, run
 * manifest JSON), so for the same inputs and seed the results are
 * byte-identical to a direct CLI run. Calls are reentrant: each spawns an
 * isolated process in a private temp directory and no state is shared.
 *
 * The Python interpreter is resolved from `HAZEMIX_PYTHON` (default
 * `python3`) and must have the `hazemix` package installed.
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { decodePng, encodePng, RawImage } from "./png";

/** Contiguous row-major 8-bit image buffer: (H, W, 3) or (H, W). */
export interface ArrayView {
  data: Uint8Array;
  width: number;
  height: number;
  channels: 1 | 3;
}

export interface DensityResult {
  /** 256 nonnegative bin masses summing to 1. */
  bins: Float64Array;
  pixelCount: number;
}

export interface AugmentResult {
  augmented: ArrayView;
  residual: number;
}

export interface RunOptions {
  /** Interpreter override; falls back to HAZEMIX_PYTHON, then "python3". */
  python?: string;
}

export interface AugmentOptions extends RunOptions {
  /**
   * Pair id recorded in the run manifest. The per-sample RNG substream is
   * keyed on (seed, id, sample index), so using the id of a pair from a
   * directory-level CLI run reproduces that exact sample.
   */
  id?: string;
  /** Control points per randomized target (generalize mode). */
  controlPoints?: number;
}

function checkView(view: ArrayView, name: string): void {
  if (!(view.data instanceof Uint8Array)) {
    throw new TypeError(`${name}.data must be a Uint8Array`);
  }
  if (view.channels !== 1 && view.channels !== 3) {
    throw new TypeError(`${name}.channels must be 1 or 3, got ${view.channels}`);
  }
  if (
    !Number.isInteger(view.width) || !Number.isInteger(view.height) ||
    view.width < 1 || view.height < 1
  ) {
    throw new TypeError(`${name} dimensions must be positive integers`);
  }
  const expected = view.width * view.height * view.channels;
  if (view.data.length !== expected) {
    throw new TypeError(
      `${name}.data has ${view.data.length} bytes, expected ` +
      `${view.width}x${view.height}x${view.channels} = ${expected}`,
    );
  }
}

function interpreter(opts?: RunOptions): string {
  return opts?.python ?? process.env.HAZEMIX_PYTHON ?? "python3";
}

function runCli(args: string[], opts?: RunOptions): string {
  const result = spawnSync(interpreter(opts), ["-m", "hazemix", ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (result.error) {
    throw result.error;
  }
  if (result.status !== 0) {
    throw new Error(
      `hazemix ${args[0]} exited with ${result.status}: ${result.stderr.trim()}`,
    );
  }
  return result.stdout;
}

function withTempDir<T>(body: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "hazemix-bindings-"));
  try {
    return body(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

function writeView(view: ArrayView, file: string): void {
  fs.writeFileSync(file, encodePng(view as RawImage));
}

/** Brightness density of an image buffer, via the `density` subcommand. */
export function estimate_density(img: ArrayView, opts?: RunOptions): DensityResult {
  checkView(img, "img");
  return withTempDir((dir) => {
    const imgPath = path.join(dir, "input.png");
    const jsonPath = path.join(dir, "density.json");
    writeView(img, imgPath);
    runCli(["density", imgPath, "--json", jsonPath], opts);
    const sidecar = JSON.parse(fs.readFileSync(jsonPath, "utf8"));
    return {
      bins: Float64Array.from(sidecar.bins as number[]),
      pixelCount: sidecar.pixel_count as number,
    };
  });
}

/** Global atmospheric light of a hazy buffer, via the `airlight` subcommand. */
export function estimate_airlight(
  img: ArrayView,
  opts?: RunOptions,
): [number, number, number] {
  checkView(img, "img");
  return withTempDir((dir) => {
    const imgPath = path.join(dir, "input.png");
    writeView(img, imgPath);
    const out = runCli(["airlight", imgPath], opts).trim();
    const parts = out.split(",").map((v) => Number.parseInt(v, 10));
    if (parts.length !== 3 || parts.some((v) => !Number.isFinite(v))) {
      throw new Error(`unexpected airlight output: ${out}`);
    }
    return [parts[0], parts[1], parts[2]];
  });
}

function writeTargetSidecar(bins: Float64Array | number[], file: string): void {
  if (bins.length !== 256) {
    throw new TypeError(`target_hist must have 256 bins, got ${bins.length}`);
  }
  const values = Array.from(bins, Number);
  const mass = values.reduce((a, b) => a + b, 0);
  if (values.some((v) => v < 0) || Math.abs(mass - 1) > 1e-9) {
    throw new TypeError("target_hist must be a normalized nonnegative histogram");
  }
  fs.writeFileSync(file, JSON.stringify({ version: 1, pixel_count: 1, bins: values }));
}

/**
 * One density-aligned augmentation of a hazy/clean pair.
 *
 * With `target_hist` the sample aligns onto that explicit density; with
 * `null` a randomized target is drawn (generalize mode). Output pixels are
 * byte-identical to the CLI `augment` run with the same inputs, seed and
 * pair id.
 */
export function damix_augment(
  hazy: ArrayView,
  clean: ArrayView,
  target_hist: Float64Array | number[] | null,
  seed: number,
  opts?: AugmentOptions,
): AugmentResult {
  checkView(hazy, "hazy");
  checkView(clean, "clean");
  if (hazy.width !== clean.width || hazy.height !== clean.height) {
    throw new TypeError(
      `hazy is ${hazy.height}x${hazy.width} but clean is ${clean.height}x${clean.width}`,
    );
  }
  if (!Number.isInteger(seed) || seed < 0) {
    throw new TypeError(`seed must be a nonnegative integer, got ${seed}`);
  }
  const id = opts?.id ?? "sample";
  return withTempDir((dir) => {
    const source = path.join(dir, "source");
    const out = path.join(dir, "out");
    fs.mkdirSync(source);
    writeView(hazy, path.join(source, `${id}_hazy.png`));
    writeView(clean, path.join(source, `${id}_GT.png`));

    const args = [
      "augment", "--source", source, "--out", out, "--seed", String(seed),
    ];
    if (target_hist === null) {
      args.push("--mode", "generalize");
      if (opts?.controlPoints !== undefined) {
        args.push("--control-points", String(opts.controlPoints));
      }
    } else {
      const histPath = path.join(dir, "target.density.json");
      writeTargetSidecar(target_hist, histPath);
      args.push("--target-hist", histPath);
    }
    runCli(args, opts);

    const manifest = JSON.parse(
      fs.readFileSync(path.join(out, "manifest.json"), "utf8"),
    );
    const record = manifest.samples.find(
      (s: { id: string; sample_index: number }) => s.id === id && s.sample_index === 0,
    );
    if (!record) {
      throw new Error(`run manifest has no sample for pair ${id}`);
    }
    const augmented = decodePng(fs.readFileSync(path.join(out, record.output)));
    return { augmented, residual: record.residual_distance as number };
  });
}
