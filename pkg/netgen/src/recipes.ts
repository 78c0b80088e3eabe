// Training recipes. Shapes follow the verifier's benchmark family: a
// side*side input image, one hidden layer of 10 relu units, and a task
// head. side 14 (196 inputs) is the full-scale setting; smaller sides give
// quick variants for tests and smoke runs.

import { Sample, detectorDataset, digitDataset } from "./dataset";
import { Mlp, accuracy, initMlp, meanSquaredError, train } from "./mlp";
import { mulberry32 } from "./rng";

export type RecipeKind = "classifier" | "detector" | "autoencoder";

export interface TrainingRecipe {
  kind: RecipeKind;
  dataset: "sevenseg"; // the built-in synthetic digit set
  side: number; // image side, inputs = side * side
  hidden: number;
  epochs: number;
  samples: number;
  seed: number;
  digit?: number; // detector only: which digit the yes/no head detects
}

export interface TrainedNet {
  net: Mlp;
  recipe: TrainingRecipe;
  metric: number; // accuracy for classifier/detector, mse for autoencoder
  metricName: "accuracy" | "mse";
}

export function defaultRecipe(kind: RecipeKind, seed: number, digit?: number): TrainingRecipe {
  return {
    kind,
    dataset: "sevenseg",
    side: 14,
    hidden: 10,
    epochs: kind === "autoencoder" ? 30 : 12,
    samples: 2000,
    seed,
    ...(kind === "detector" ? { digit: digit ?? 0 } : {}),
  };
}

export function runRecipe(recipe: TrainingRecipe): TrainedNet {
  const rng = mulberry32(recipe.seed);
  const dim = recipe.side * recipe.side;
  let data: Sample[];
  let sizes: number[];
  if (recipe.kind === "detector") {
    if (recipe.digit === undefined) throw new Error("detector recipe needs a digit");
    data = detectorDataset(rng, recipe.side, recipe.digit, recipe.samples);
    sizes = [dim, recipe.hidden, 2];
  } else {
    data = digitDataset(rng, recipe.side, recipe.samples);
    sizes = recipe.kind === "classifier" ? [dim, recipe.hidden, 10] : [dim, recipe.hidden, dim];
  }
  const net = initMlp(rng, sizes);
  const loss = recipe.kind === "autoencoder" ? "mse" : "softmax";
  train(net, rng, data, { epochs: recipe.epochs, lr: loss === "mse" ? 0.05 : 0.02, loss });
  if (loss === "mse") {
    return { net, recipe, metric: meanSquaredError(net, data), metricName: "mse" };
  }
  return { net, recipe, metric: accuracy(net, data), metricName: "accuracy" };
}
