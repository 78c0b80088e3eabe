#!/usr/bin/env node
// netgen command line: train-and-export produces verifier-ready network
// files with exact reference outputs; make-specs turns a directory of them
// into ready-to-run property files.

import { parseArgs } from "util";

import { DEFAULT_PLAN, makeSpecs, trainAndExport } from "./commands";
import { RecipeKind, defaultRecipe } from "./recipes";

const USAGE = `usage:
  netgen train-and-export --kind classifier|detector|autoencoder --seed N --out DIR
                          [--digit D] [--name NAME] [--side N] [--hidden N]
                          [--epochs N] [--samples N] [--checks N]
  netgen make-specs --dir DIR [--classifier F] [--classifier-alt F]
                    [--detector F] [--autoencoder F] [--class N]
                    [--eps RAT] [--margin RAT] [--equiv-eps RAT]
`;

function fail(msg: string): never {
  process.stderr.write(msg + "\n" + USAGE);
  process.exit(3);
}

function intFlag(value: string | undefined, fallback: number, flag: string): number {
  if (value === undefined) return fallback;
  const n = Number(value);
  if (!Number.isInteger(n) || n < 0) fail(`${flag} wants a non-negative integer, got ${value}`);
  return n;
}

function cmdTrainAndExport(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      kind: { type: "string" },
      seed: { type: "string" },
      out: { type: "string" },
      digit: { type: "string" },
      name: { type: "string" },
      side: { type: "string" },
      hidden: { type: "string" },
      epochs: { type: "string" },
      samples: { type: "string" },
      checks: { type: "string" },
    },
  });
  const kind = values.kind as RecipeKind | undefined;
  if (!kind || !["classifier", "detector", "autoencoder"].includes(kind)) {
    fail("--kind must be classifier, detector, or autoencoder");
  }
  if (values.seed === undefined) fail("--seed is required");
  if (!values.out) fail("--out DIR is required");
  const digit = values.digit === undefined ? undefined : intFlag(values.digit, 0, "--digit");
  const recipe = defaultRecipe(kind, intFlag(values.seed, 0, "--seed"), digit);
  recipe.side = intFlag(values.side, recipe.side, "--side");
  recipe.hidden = intFlag(values.hidden, recipe.hidden, "--hidden");
  recipe.epochs = intFlag(values.epochs, recipe.epochs, "--epochs");
  recipe.samples = intFlag(values.samples, recipe.samples, "--samples");
  const checks = intFlag(values.checks, 100, "--checks");
  const name =
    values.name ?? (kind === "detector" ? `detector_${recipe.digit}` : kind);
  trainAndExport(recipe, name, values.out, checks, (line) => console.log(line));
  return 0;
}

function cmdMakeSpecs(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      dir: { type: "string" },
      classifier: { type: "string" },
      "classifier-alt": { type: "string" },
      detector: { type: "string" },
      autoencoder: { type: "string" },
      class: { type: "string" },
      eps: { type: "string" },
      margin: { type: "string" },
      "equiv-eps": { type: "string" },
    },
  });
  if (!values.dir) fail("--dir DIR is required");
  const written = makeSpecs(
    values.dir,
    {
      classifier: values.classifier ?? "classifier.json",
      classifierAlt: values["classifier-alt"] ?? "classifier_alt.json",
      detector: values.detector ?? "detector_0.json",
      autoencoder: values.autoencoder ?? "autoencoder.json",
      targetClass: intFlag(values.class, DEFAULT_PLAN.targetClass, "--class"),
      reconstructionEps: values.eps ?? DEFAULT_PLAN.reconstructionEps,
      margin: values.margin ?? DEFAULT_PLAN.margin,
      equivalenceEps: values["equiv-eps"] ?? DEFAULT_PLAN.equivalenceEps,
    },
    (line) => console.log(line),
  );
  console.log(`${written.length} property files in ${values.dir}`);
  return 0;
}

function main(): number {
  const [cmd, ...rest] = process.argv.slice(2);
  try {
    if (cmd === "train-and-export") return cmdTrainAndExport(rest);
    if (cmd === "make-specs") return cmdMakeSpecs(rest);
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    return 3;
  }
  fail(cmd ? `unknown command ${cmd}` : "missing command");
}

process.exit(main());
