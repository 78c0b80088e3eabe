// The verifier is a separate program. Everything netgen needs from it goes
// through its command line and file formats; nothing here imports verifier
// internals.

import { spawnSync } from "child_process";

export const VERIFIER = process.env.RELUCHECK_BIN ?? "relucheck";

export interface RunResult {
  status: number;
  stdout: string;
  stderr: string;
}

export function runVerifier(args: string[], cwd?: string): RunResult {
  const res = spawnSync(VERIFIER, args, { cwd, encoding: "utf8" });
  if (res.error) {
    throw new Error(`could not run ${VERIFIER}: ${res.error.message}`);
  }
  return { status: res.status ?? -1, stdout: res.stdout, stderr: res.stderr };
}

export function verifierAvailable(): boolean {
  const res = spawnSync(VERIFIER, ["--help"], { encoding: "utf8" });
  return !res.error && res.status === 0;
}
