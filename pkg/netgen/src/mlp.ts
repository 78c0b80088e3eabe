// Plain float MLP with hand-written SGD. The verifier's network format is
// dense affine layers with relu on hidden layers and a linear output, so
// that is exactly the shape trained here. No frameworks: the models are
// tiny and the training loop must be deterministic given a seed.

import { Rng, shuffle, uniform } from "./rng";
import { Sample } from "./dataset";

export interface Mlp {
  sizes: number[]; // [inputs, hidden..., outputs]
  weights: number[][][]; // weights[l][i][j]: layer l, row i over inputs j
  biases: number[][];
}

export type Loss = "softmax" | "mse";

export function initMlp(rng: Rng, sizes: number[]): Mlp {
  const weights: number[][][] = [];
  const biases: number[][] = [];
  for (let l = 0; l + 1 < sizes.length; l++) {
    const fanIn = sizes[l];
    const fanOut = sizes[l + 1];
    const limit = Math.sqrt(6 / (fanIn + fanOut));
    const w: number[][] = [];
    for (let i = 0; i < fanOut; i++) {
      const row: number[] = [];
      for (let j = 0; j < fanIn; j++) row.push(uniform(rng, -limit, limit));
      w.push(row);
    }
    weights.push(w);
    biases.push(new Array<number>(fanOut).fill(0));
  }
  return { sizes, weights, biases };
}

// post-activation values of every layer, input first
export function activations(net: Mlp, x: number[]): number[][] {
  const acts: number[][] = [x];
  let cur = x;
  const last = net.weights.length - 1;
  for (let l = 0; l < net.weights.length; l++) {
    const w = net.weights[l];
    const b = net.biases[l];
    const next = new Array<number>(w.length);
    for (let i = 0; i < w.length; i++) {
      let s = b[i];
      const row = w[i];
      for (let j = 0; j < row.length; j++) s += row[j] * cur[j];
      next[i] = l === last ? s : Math.max(0, s);
    }
    acts.push(next);
    cur = next;
  }
  return acts;
}

export function forward(net: Mlp, x: number[]): number[] {
  const acts = activations(net, x);
  return acts[acts.length - 1];
}

function softmax(z: number[]): number[] {
  const m = Math.max(...z);
  const exps = z.map((v) => Math.exp(v - m));
  const total = exps.reduce((a, b) => a + b, 0);
  return exps.map((e) => e / total);
}

// One SGD step on one sample. target is a class index under softmax loss
// and a full output vector under mse.
function step(net: Mlp, x: number[], target: number | number[], loss: Loss, lr: number): void {
  const acts = activations(net, x);
  const out = acts[acts.length - 1];
  let delta: number[];
  if (loss === "softmax") {
    const p = softmax(out);
    delta = p.slice();
    delta[target as number] -= 1;
  } else {
    const want = target as number[];
    delta = out.map((v, i) => (2 * (v - want[i])) / out.length);
  }
  for (let l = net.weights.length - 1; l >= 0; l--) {
    const w = net.weights[l];
    const b = net.biases[l];
    const inp = acts[l];
    const prev = l > 0 ? new Array<number>(inp.length).fill(0) : null;
    for (let i = 0; i < w.length; i++) {
      const d = delta[i];
      if (d === 0) continue;
      const row = w[i];
      for (let j = 0; j < row.length; j++) {
        if (prev) prev[j] += d * row[j];
        row[j] -= lr * d * inp[j];
      }
      b[i] -= lr * d;
    }
    if (prev) {
      // relu gate: gradient only flows where the hidden unit fired
      for (let j = 0; j < prev.length; j++) if (inp[j] <= 0) prev[j] = 0;
      delta = prev;
    }
  }
}

export interface TrainOptions {
  epochs: number;
  lr: number;
  loss: Loss;
  log?: (epoch: number, metric: number) => void;
}

// For softmax the target is sample.label; for mse the target is the input
// itself (autoencoder training).
export function train(net: Mlp, rng: Rng, data: Sample[], opts: TrainOptions): void {
  const order = data.map((_, i) => i);
  for (let epoch = 0; epoch < opts.epochs; epoch++) {
    shuffle(rng, order);
    for (const k of order) {
      const s = data[k];
      const target = opts.loss === "softmax" ? s.label : s.pixels;
      step(net, s.pixels, target, opts.loss, opts.lr);
    }
    if (opts.log) {
      const metric =
        opts.loss === "softmax" ? accuracy(net, data) : meanSquaredError(net, data);
      opts.log(epoch, metric);
    }
  }
}

export function accuracy(net: Mlp, data: Sample[]): number {
  let hits = 0;
  for (const s of data) {
    const out = forward(net, s.pixels);
    let best = 0;
    for (let i = 1; i < out.length; i++) if (out[i] > out[best]) best = i;
    if (best === s.label) hits++;
  }
  return hits / data.length;
}

export function meanSquaredError(net: Mlp, data: Sample[]): number {
  let total = 0;
  for (const s of data) {
    const out = forward(net, s.pixels);
    for (let i = 0; i < out.length; i++) {
      const e = out[i] - s.pixels[i];
      total += e * e;
    }
  }
  return total / (data.length * net.sizes[net.sizes.length - 1]);
}
