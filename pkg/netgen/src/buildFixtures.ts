// Regenerates fixtures/ from scratch: four trained networks at full scale
// (14x14 inputs), 100 exact reference traces each, and the three property
// files. Everything is seeded, so reruns reproduce the directory byte for
// byte. Invoked as `npm run fixtures`.

import * as fs from "fs";
import * as path from "path";

import { makeSpecs, trainAndExport } from "./commands";
import { defaultRecipe } from "./recipes";

const FIXTURES = path.join(__dirname, "..", "fixtures");

function main(): void {
  fs.rmSync(FIXTURES, { recursive: true, force: true });
  fs.mkdirSync(FIXTURES, { recursive: true });
  const log = (line: string) => console.log(line);

  trainAndExport(defaultRecipe("classifier", 11), "classifier", FIXTURES, 100, log);
  trainAndExport(defaultRecipe("classifier", 12), "classifier_alt", FIXTURES, 100, log);
  trainAndExport(defaultRecipe("detector", 13, 0), "detector_0", FIXTURES, 100, log);
  trainAndExport(defaultRecipe("autoencoder", 14), "autoencoder", FIXTURES, 100, log);

  makeSpecs(
    FIXTURES,
    {
      classifier: "classifier.json",
      classifierAlt: "classifier_alt.json",
      detector: "detector_0.json",
      autoencoder: "autoencoder.json",
      targetClass: 0,
      reconstructionEps: "1/10",
      margin: "2",
      equivalenceEps: "1/20",
    },
    log,
  );
  console.log(`fixtures ready in ${FIXTURES}`);
}

main();
