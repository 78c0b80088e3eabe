import { describe, expect, it } from "vitest";

import { detectorDataset, digitDataset, glyphPixels, renderDigit } from "../src/dataset";
import { mulberry32 } from "../src/rng";

describe("glyphs", () => {
  it("are pairwise distinct for all ten digits", () => {
    for (const side of [7, 14]) {
      const keys = new Set<string>();
      for (let d = 0; d <= 9; d++) {
        keys.add([...glyphPixels(side, d)].sort((a, b) => a - b).join(","));
      }
      expect(keys.size).toBe(10);
    }
  });

  it("rejects grids too small to draw on", () => {
    expect(() => glyphPixels(6, 0)).toThrow();
  });
});

describe("renderDigit", () => {
  it("stays inside [0, 1] and lights the stroke", () => {
    const rng = mulberry32(5);
    for (let d = 0; d <= 9; d++) {
      const img = renderDigit(rng, 14, d);
      expect(img.length).toBe(196);
      expect(Math.min(...img)).toBeGreaterThanOrEqual(0);
      expect(Math.max(...img)).toBeLessThanOrEqual(1);
      const bright = img.filter((p) => p > 0.5).length;
      expect(bright).toBeGreaterThan(8); // the strokes are there
      expect(bright).toBeLessThan(96); // and the background is not
    }
  });

  it("is reproducible from the seed", () => {
    const a = digitDataset(mulberry32(9), 14, 40);
    const b = digitDataset(mulberry32(9), 14, 40);
    expect(a).toEqual(b);
  });
});

describe("detectorDataset", () => {
  it("balances yes and no and never mislabels", () => {
    const data = detectorDataset(mulberry32(3), 7, 4, 200);
    const yes = data.filter((s) => s.label === 1).length;
    expect(yes).toBe(100);
    for (const s of data) expect([0, 1]).toContain(s.label);
  });
});
