// Synthetic digit images. Glyphs are drawn seven-segment style on a square
// grid, then jittered: whole-glyph shifts, per-sample stroke brightness,
// per-pixel noise. No downloads, no files, fully seeded; the classes are
// still distinct enough that a small MLP has something real to learn.

import { Rng, normal, randInt, uniform } from "./rng";

// segments: 0 top, 1 top-right, 2 bottom-right, 3 bottom, 4 bottom-left,
// 5 top-left, 6 middle
const SEGMENTS: number[][] = [
  [0, 1, 2, 3, 4, 5],    // 0
  [1, 2],                // 1
  [0, 1, 6, 4, 3],       // 2
  [0, 1, 6, 2, 3],       // 3
  [5, 6, 1, 2],          // 4
  [0, 5, 6, 2, 3],       // 5
  [0, 5, 6, 4, 3, 2],    // 6
  [0, 1, 2],             // 7
  [0, 1, 2, 3, 4, 5, 6], // 8
  [0, 1, 2, 3, 5, 6],    // 9
];

export interface Sample {
  pixels: number[]; // row-major, side*side values in [0, 1]
  label: number; // digit 0..9
}

function clamp01(x: number): number {
  return x < 0 ? 0 : x > 1 ? 1 : x;
}

// Pixel coordinates of a digit's segments on an side x side grid.
// Needs side >= 7 to keep the three horizontal bars apart.
export function glyphPixels(side: number, digit: number, dx = 0, dy = 0): Set<number> {
  if (side < 7) throw new Error(`side ${side} too small for glyphs`);
  if (digit < 0 || digit > 9) throw new Error(`not a digit: ${digit}`);
  const left = Math.round(side * 0.3) + dx;
  const right = Math.round(side * 0.65) + dx;
  const top = Math.round(side * 0.15) + dy;
  const mid = Math.round(side * 0.5) + dy;
  const bot = Math.round(side * 0.8) + dy;
  const on = new Set<number>();
  const put = (x: number, y: number) => {
    if (x >= 0 && x < side && y >= 0 && y < side) on.add(y * side + x);
  };
  const hline = (y: number) => {
    for (let x = left; x <= right; x++) put(x, y);
  };
  const vline = (x: number, y0: number, y1: number) => {
    for (let y = y0; y <= y1; y++) put(x, y);
  };
  for (const seg of SEGMENTS[digit]) {
    switch (seg) {
      case 0: hline(top); break;
      case 1: vline(right, top, mid); break;
      case 2: vline(right, mid, bot); break;
      case 3: hline(bot); break;
      case 4: vline(left, mid, bot); break;
      case 5: vline(left, top, mid); break;
      case 6: hline(mid); break;
    }
  }
  return on;
}

export function renderDigit(rng: Rng, side: number, digit: number): number[] {
  const dx = randInt(rng, 3) - 1;
  const dy = randInt(rng, 3) - 1;
  const on = glyphPixels(side, digit, dx, dy);
  const stroke = uniform(rng, 0.7, 1.0);
  const pixels = new Array<number>(side * side);
  for (let i = 0; i < pixels.length; i++) {
    const base = on.has(i) ? stroke : 0;
    pixels[i] = clamp01(base + normal(rng, 0, 0.04));
  }
  return pixels;
}

// labels cycle 0..9 so every class is equally represented
export function digitDataset(rng: Rng, side: number, count: number): Sample[] {
  const out: Sample[] = [];
  for (let i = 0; i < count; i++) {
    const label = i % 10;
    out.push({ pixels: renderDigit(rng, side, label), label });
  }
  return out;
}

// Detector view of the same data: half the samples show `digit`, half show
// the other nine classes, so the yes/no head trains on balanced batches.
// label 1 means "is the digit".
export function detectorDataset(
  rng: Rng,
  side: number,
  digit: number,
  count: number,
): Sample[] {
  const out: Sample[] = [];
  for (let i = 0; i < count; i++) {
    const positive = i % 2 === 0;
    let cls: number;
    if (positive) {
      cls = digit;
    } else {
      cls = randInt(rng, 9);
      if (cls >= digit) cls += 1;
    }
    out.push({ pixels: renderDigit(rng, side, cls), label: positive ? 1 : 0 });
  }
  return out;
}
