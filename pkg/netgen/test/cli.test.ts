// End-to-end: the built netgen CLI against the real verifier binary. Runs
// at reduced scale (7x7 images, 6 hidden units) so the verify calls finish
// in seconds while exercising the same code paths as the full-scale
// fixtures.

import { spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { verifierAvailable } from "../src/primary";
import { parseFrac } from "../src/rational";

const CLI = path.join(__dirname, "..", "dist", "cli.js");
const VERIFIER = process.env.RELUCHECK_BIN ?? "relucheck";

let dir: string;

function netgen(...args: string[]) {
  const res = spawnSync("node", [CLI, ...args], { encoding: "utf8" });
  if (res.status !== 0) {
    throw new Error(`netgen ${args[0]} failed (${res.status}): ${res.stderr}`);
  }
  return res.stdout;
}

function verifier(args: string[], cwd: string) {
  return spawnSync(VERIFIER, args, { cwd, encoding: "utf8" });
}

beforeAll(() => {
  if (!verifierAvailable()) {
    throw new Error(`verifier binary ${VERIFIER} not on PATH; install the main package first`);
  }
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "netgen-e2e-"));
  const common = ["--side", "7", "--hidden", "6", "--samples", "400", "--checks", "10", "--out", dir];
  netgen("train-and-export", "--kind", "classifier", "--seed", "21", "--epochs", "6", ...common);
  netgen("train-and-export", "--kind", "classifier", "--seed", "22", "--epochs", "6", "--name", "classifier_alt", ...common);
  netgen("train-and-export", "--kind", "detector", "--digit", "0", "--seed", "23", "--epochs", "6", ...common);
  netgen("train-and-export", "--kind", "autoencoder", "--seed", "24", "--epochs", "12", ...common);
}, 120_000);

afterAll(() => {
  if (dir) fs.rmSync(dir, { recursive: true, force: true });
});

describe("train-and-export", () => {
  it("writes the four networks plus checks and metadata", () => {
    for (const f of ["classifier.json", "classifier_alt.json", "detector_0.json", "autoencoder.json"]) {
      expect(fs.existsSync(path.join(dir, f))).toBe(true);
    }
    const meta = JSON.parse(fs.readFileSync(path.join(dir, "metadata.json"), "utf8"));
    expect(meta["classifier.json"].recipe.seed).toBe(21);
    expect(meta["classifier.json"].accuracy).toBeGreaterThan(0.5);
    expect(meta["autoencoder.json"].mse).toBeLessThan(0.2);
    expect(meta["detector_0.json"].recipe.digit).toBe(0);
  });

  it("reference outputs match the verifier's evaluator exactly", () => {
    const checks = JSON.parse(fs.readFileSync(path.join(dir, "checks.json"), "utf8"));
    const files = Object.keys(checks);
    expect(files.length).toBe(4);
    for (const f of files) {
      for (const sample of checks[f].slice(0, 3)) {
        const res = verifier(["eval", f, "--input", sample.input.join(",")], dir);
        expect(res.status, res.stderr).toBe(0);
        const got = res.stdout.trim().split(",").map(parseFrac);
        const want = sample.output.map(parseFrac);
        expect(got).toEqual(want);
      }
    }
  }, 120_000);
});

describe("make-specs", () => {
  // test-scale parameters picked so no property is vacuous: a loose
  // reconstruction gate keeps the confidence precondition satisfiable
  it("emits property files the verifier decides end to end", () => {
    netgen("make-specs", "--dir", dir, "--eps", "2", "--margin", "2");
    for (const spec of ["agreement.prop", "confidence.prop", "equivalence.prop"]) {
      const report = spec.replace(".prop", ".report.json");
      const res = verifier(
        ["verify", spec, "--timeout", "240", "--out", report],
        dir,
      );
      expect([0, 1], `${spec}: ${res.stderr}`).toContain(res.status);
      if (res.status === 1) {
        const replay = verifier(["check-cex", spec, report], dir);
        expect(replay.status, replay.stderr).toBe(0);
      }
    }
  }, 600_000);
});
