// The two things netgen does: train a recipe and export the result next to
// exact reference outputs, and generate ready-to-run property files by
// driving the verifier's own template command.

import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import {
  RationalNet,
  exactForward,
  formatFrac,
  formatPixel,
  pixelFrac,
  quantizeNet,
  renderNet,
} from "./netfile";
import { TrainedNet, TrainingRecipe, runRecipe } from "./recipes";
import { mulberry32 } from "./rng";
import { runVerifier } from "./primary";
import { Frac } from "./rational";

export interface CheckSample {
  input: string[]; // decimal strings on the 10^-6 grid
  output: string[]; // exact "p/q" strings from the rational forward pass
}

export interface ExportResult {
  file: string;
  trained: TrainedNet;
  rational: RationalNet;
}

function readJsonIfAny(file: string): Record<string, unknown> {
  if (!fs.existsSync(file)) return {};
  return JSON.parse(fs.readFileSync(file, "utf8"));
}

function writeJsonSorted(file: string, doc: Record<string, unknown>): void {
  const sorted: Record<string, unknown> = {};
  for (const key of Object.keys(doc).sort()) sorted[key] = doc[key];
  fs.writeFileSync(file, JSON.stringify(sorted, null, 2) + "\n");
}

// Exact reference traces for a quantized network: random inputs on the
// same 10^-6 grid as the weights, outputs from the rational forward pass.
export function checkSamples(net: RationalNet, seed: number, count: number): CheckSample[] {
  const rng = mulberry32(seed ^ 0x5eed5eed);
  const out: CheckSample[] = [];
  for (let k = 0; k < count; k++) {
    const x: Frac[] = [];
    for (let j = 0; j < net.inputDim; j++) x.push(pixelFrac(rng()));
    const y = exactForward(net, x);
    out.push({ input: x.map(formatPixel), output: y.map(formatFrac) });
  }
  return out;
}

export function trainAndExport(
  recipe: TrainingRecipe,
  name: string,
  outDir: string,
  checks: number,
  log: (line: string) => void = () => {},
): ExportResult {
  const trained = runRecipe(recipe);
  log(`${name}: trained, ${trained.metricName} ${trained.metric.toFixed(4)}`);
  const rational = quantizeNet(name, trained.net);
  fs.mkdirSync(outDir, { recursive: true });
  const file = `${name}.json`;
  fs.writeFileSync(path.join(outDir, file), renderNet(rational));

  if (checks > 0) {
    const checksFile = path.join(outDir, "checks.json");
    const manifest = readJsonIfAny(checksFile);
    manifest[file] = checkSamples(rational, recipe.seed, checks);
    writeJsonSorted(checksFile, manifest);
  }

  const metaFile = path.join(outDir, "metadata.json");
  const meta = readJsonIfAny(metaFile);
  meta[file] = {
    recipe: { ...recipe },
    [trained.metricName]: Number(trained.metric.toFixed(6)),
    weight_quantum: "1/1000000",
  };
  writeJsonSorted(metaFile, meta);
  log(`${name}: wrote ${file} (+checks, +metadata)`);
  return { file, trained, rational };
}

export interface SpecPlan {
  classifier: string; // filenames inside dir
  classifierAlt: string;
  detector: string;
  autoencoder: string;
  targetClass: number;
  reconstructionEps: string;
  margin: string;
  equivalenceEps: string;
}

export const DEFAULT_PLAN: Omit<SpecPlan, "classifier" | "classifierAlt" | "detector" | "autoencoder"> = {
  targetClass: 0,
  reconstructionEps: "1/10",
  margin: "2",
  equivalenceEps: "1/20",
};

// Property files come out of the verifier's template command, run with the
// export directory as cwd so the network paths inside the files stay bare
// filenames and the directory remains relocatable.
export function makeSpecs(dir: string, plan: SpecPlan, log: (line: string) => void = () => {}): string[] {
  const jobs: Array<{ out: string; args: string[] }> = [
    {
      out: "agreement.prop",
      args: [
        "template", "agreement",
        "--nuv", plan.classifier,
        "--ref", plan.detector,
        "--class", String(plan.targetClass),
      ],
    },
    {
      out: "confidence.prop",
      args: [
        "template", "certified-confidence",
        "--nuv", plan.classifier,
        "--ref", plan.autoencoder,
        "--class", String(plan.targetClass),
        "--eps", plan.reconstructionEps,
        "--margin", plan.margin,
      ],
    },
    {
      out: "equivalence.prop",
      args: [
        "template", "equivalence",
        "--nuv", plan.classifier,
        "--ref", plan.classifierAlt,
        "--eps", plan.equivalenceEps,
      ],
    },
  ];
  const written: string[] = [];
  const scratch = fs.mkdtempSync(path.join(os.tmpdir(), "netgen-"));
  try {
    for (const job of jobs) {
      const res = runVerifier([...job.args, "--out", job.out], dir);
      if (res.status !== 0) {
        throw new Error(`template for ${job.out} failed: ${res.stderr.trim()}`);
      }
      // bind check: export compiles the property against the real files
      const probe = runVerifier(
        ["export", job.out, "--out", path.join(scratch, job.out + ".smt2")],
        dir,
      );
      if (probe.status !== 0) {
        throw new Error(`${job.out} does not bind: ${probe.stderr.trim()}`);
      }
      log(`wrote ${job.out} (parses and binds)`);
      written.push(job.out);
    }
  } finally {
    fs.rmSync(scratch, { recursive: true, force: true });
  }
  return written;
}
