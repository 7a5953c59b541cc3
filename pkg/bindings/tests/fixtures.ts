/** Deterministic fixture images for the binding tests. */

import { ArrayView } from "../src/index";

/** mulberry32: tiny seeded PRNG, stable across platforms. */
export function rng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function randomImage(
  seed: number,
  width: number,
  height: number,
  low = 0,
  high = 256,
): ArrayView {
  const next = rng(seed);
  const data = new Uint8Array(width * height * 3);
  for (let i = 0; i < data.length; i++) {
    data[i] = low + Math.floor(next() * (high - low));
  }
  return { data, width, height, channels: 3 };
}

/** A hazy/clean pair: clean is darker, hazy is a brightened version. */
export function fixturePair(seed: number, side = 24): { hazy: ArrayView; clean: ArrayView } {
  const clean = randomImage(seed, side, side, 5, 140);
  const next = rng(seed ^ 0x9e3779b9);
  const hazyData = new Uint8Array(clean.data.length);
  for (let p = 0; p < side * side; p++) {
    const t = 0.3 + 0.6 * next(); // per-pixel transmission
    for (let c = 0; c < 3; c++) {
      const i = p * 3 + c;
      hazyData[i] = Math.min(255, Math.round(clean.data[i] * t + 228 * (1 - t)));
    }
  }
  return { hazy: { data: hazyData, width: side, height: side, channels: 3 }, clean };
}
