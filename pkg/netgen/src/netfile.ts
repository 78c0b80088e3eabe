// Export trained floats in the verifier's network file format. Weights are
// quantized to multiples of 1/10^6 at export time; the exported (quantized)
// network is the artifact everything downstream reasons about, so this
// module also carries an exact rational forward pass over it. Reference
// outputs shipped next to a network come from that exact pass, never from
// float arithmetic.

import { Mlp } from "./mlp";
import {
  Frac,
  ZERO,
  add,
  formatFrac,
  frac,
  mul,
  quantize,
  relu,
  toNumber,
} from "./rational";

export interface RationalLayer {
  weights: Frac[][];
  bias: Frac[];
  activation: "relu" | "linear";
}

export interface RationalNet {
  name: string;
  inputDim: number;
  layers: RationalLayer[];
}

export function quantizeNet(name: string, net: Mlp): RationalNet {
  const layers: RationalLayer[] = [];
  const last = net.weights.length - 1;
  for (let l = 0; l < net.weights.length; l++) {
    layers.push({
      weights: net.weights[l].map((row) => row.map(quantize)),
      bias: net.biases[l].map(quantize),
      activation: l === last ? "linear" : "relu",
    });
  }
  return { name, inputDim: net.sizes[0], layers };
}

export function exactForward(net: RationalNet, x: Frac[]): Frac[] {
  if (x.length !== net.inputDim) {
    throw new Error(`input has ${x.length} entries, network takes ${net.inputDim}`);
  }
  let cur = x;
  for (const layer of net.layers) {
    const next: Frac[] = [];
    for (let i = 0; i < layer.weights.length; i++) {
      let s = layer.bias[i];
      const row = layer.weights[i];
      for (let j = 0; j < row.length; j++) {
        if (row[j].n !== 0n) s = add(s, mul(row[j], cur[j]));
      }
      next.push(layer.activation === "relu" ? relu(s) : s);
    }
    cur = next;
  }
  return cur;
}

// Float forward over the quantized weights. Fidelity of the export is
// judged exactly here: this must stay within the 10^-6 quantum of
// exactForward, which float64 clears by many orders of magnitude at these
// sizes.
export function quantizedFloatForward(net: RationalNet, x: number[]): number[] {
  let cur = x;
  for (const layer of net.layers) {
    const next: number[] = [];
    for (let i = 0; i < layer.weights.length; i++) {
      let s = toNumber(layer.bias[i]);
      const row = layer.weights[i];
      for (let j = 0; j < row.length; j++) s += toNumber(row[j]) * cur[j];
      next.push(layer.activation === "relu" ? Math.max(0, s) : s);
    }
    cur = next;
  }
  return cur;
}

// Key order is fixed by construction, so the same network always
// serializes to the same bytes.
export function renderNet(net: RationalNet): string {
  const doc = {
    name: net.name,
    input_dim: net.inputDim,
    layers: net.layers.map((layer) => ({
      weights: layer.weights.map((row) => row.map(formatFrac)),
      bias: layer.bias.map(formatFrac),
      activation: layer.activation,
    })),
  };
  return JSON.stringify(doc, null, 2) + "\n";
}

export function outputDim(net: RationalNet): number {
  return net.layers[net.layers.length - 1].weights.length;
}

// Pixel values quantized the same way as weights; six decimal places is
// exactly the k/10^6 grid.
export function pixelFrac(p: number): Frac {
  return quantize(p);
}

export function formatPixel(p: Frac): string {
  // decimals keep check files compact; the verifier reads them exactly
  const k = (p.n * 1_000_000n) / p.d;
  const sign = k < 0n ? "-" : "";
  const mag = k < 0n ? -k : k;
  const whole = mag / 1_000_000n;
  const rest = (mag % 1_000_000n).toString().padStart(6, "0");
  return `${sign}${whole}.${rest}`;
}

export function fracVec(xs: number[]): Frac[] {
  return xs.map(pixelFrac);
}

export { formatFrac, frac, ZERO };
