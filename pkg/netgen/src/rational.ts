// Exact rationals over BigInt. The verifier consumes networks with exact
// rational weights, so the exporter quantizes floats to multiples of
// 1/QUANTUM_DEN and every reference output is computed in this arithmetic,
// never in floating point.

export const QUANTUM_DEN = 1_000_000n;

export interface Frac {
  n: bigint; // numerator, carries the sign
  d: bigint; // denominator, always positive
}

function gcd(a: bigint, b: bigint): bigint {
  a = a < 0n ? -a : a;
  b = b < 0n ? -b : b;
  while (b) {
    [a, b] = [b, a % b];
  }
  return a;
}

export function frac(n: bigint, d: bigint = 1n): Frac {
  if (d === 0n) throw new Error("zero denominator");
  if (d < 0n) {
    n = -n;
    d = -d;
  }
  const g = gcd(n, d);
  return g > 1n ? { n: n / g, d: d / g } : { n, d };
}

export const ZERO: Frac = { n: 0n, d: 1n };

export function add(a: Frac, b: Frac): Frac {
  return frac(a.n * b.d + b.n * a.d, a.d * b.d);
}

export function sub(a: Frac, b: Frac): Frac {
  return frac(a.n * b.d - b.n * a.d, a.d * b.d);
}

export function mul(a: Frac, b: Frac): Frac {
  return frac(a.n * b.n, a.d * b.d);
}

export function cmp(a: Frac, b: Frac): number {
  const diff = a.n * b.d - b.n * a.d;
  return diff < 0n ? -1 : diff > 0n ? 1 : 0;
}

export function relu(a: Frac): Frac {
  return a.n > 0n ? a : ZERO;
}

export function abs(a: Frac): Frac {
  return a.n < 0n ? { n: -a.n, d: a.d } : a;
}

// Nearest multiple of 1/QUANTUM_DEN, ties away from zero. This is the one
// place floats enter; everything downstream of it is exact.
export function quantize(x: number): Frac {
  if (!Number.isFinite(x)) throw new Error(`cannot quantize ${x}`);
  const scaled = x * Number(QUANTUM_DEN);
  const k = BigInt(x >= 0 ? Math.round(scaled) : -Math.round(-scaled));
  return frac(k, QUANTUM_DEN);
}

export function toNumber(a: Frac): number {
  // scale before dividing so fractions wider than 2^53 still convert
  const SHIFT = 10n ** 15n;
  return Number((a.n * SHIFT) / a.d) / 1e15;
}

export function formatFrac(a: Frac): string {
  return a.d === 1n ? a.n.toString() : `${a.n}/${a.d}`;
}

export function parseFrac(text: string): Frac {
  const t = text.trim();
  const slash = t.indexOf("/");
  if (slash >= 0) {
    return frac(BigInt(t.slice(0, slash)), BigInt(t.slice(slash + 1)));
  }
  const dot = t.indexOf(".");
  if (dot >= 0) {
    const sign = t.startsWith("-") ? -1n : 1n;
    const digits = (t.startsWith("-") || t.startsWith("+") ? t.slice(1) : t).split(".");
    const places = BigInt(digits[1].length);
    const n = BigInt(digits[0] + digits[1]);
    return frac(sign * n, 10n ** places);
  }
  return frac(BigInt(t));
}
