/**
 * Minimal PNG bridge over pngjs: 8-bit RGB or grayscale buffers in and out.
 */

import { PNG } from "pngjs";

export interface RawImage {
  data: Uint8Array; // row-major, 1 or 3 channels
  width: number;
  height: number;
  channels: 1 | 3;
}

/** Encode a raw buffer as an 8-bit RGB PNG. */
export function encodePng(img: RawImage): Buffer {
  const png = new PNG({ width: img.width, height: img.height });
  const pixels = img.width * img.height;
  for (let i = 0; i < pixels; i++) {
    const out = i * 4;
    if (img.channels === 3) {
      png.data[out] = img.data[i * 3];
      png.data[out + 1] = img.data[i * 3 + 1];
      png.data[out + 2] = img.data[i * 3 + 2];
    } else {
      png.data[out] = png.data[out + 1] = png.data[out + 2] = img.data[i];
    }
    png.data[out + 3] = 255;
  }
  // colorType 2: plain 8-bit RGB, no alpha channel in the file.
  return PNG.sync.write(png, { colorType: 2 });
}

/** Decode a PNG into a contiguous RGB buffer (alpha is rejected upstream). */
export function decodePng(bytes: Buffer): RawImage {
  const png = PNG.sync.read(bytes);
  const pixels = png.width * png.height;
  const data = new Uint8Array(pixels * 3);
  for (let i = 0; i < pixels; i++) {
    data[i * 3] = png.data[i * 4];
    data[i * 3 + 1] = png.data[i * 4 + 1];
    data[i * 3 + 2] = png.data[i * 4 + 2];
  }
  return { data, width: png.width, height: png.height, channels: 3 };
}
