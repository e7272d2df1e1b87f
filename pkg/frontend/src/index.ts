/** render(spec) dispatch and the command-line entry point. */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { argv, exit, stderr, stdout } from "node:process";

import { renderCounts, renderPaths, renderPhase, renderRelax,
         renderSpectrum } from "./figures.js";
import { FigureKind, FigureSpec, SchemaError, loadInputs } from "./schema.js";

const RENDERERS = {
  paths: renderPaths,
  counts: renderCounts,
  phase: renderPhase,
  relax: renderRelax,
  spectrum: renderSpectrum,
} as const;

/** Validate inputs, render, and write the SVG; returns the output path. */
export function render(spec: FigureSpec): string {
  const inputs = loadInputs(spec);
  const svg = RENDERERS[spec.kind](inputs);
  mkdirSync(dirname(spec.out), { recursive: true });
  writeFileSync(spec.out, svg);
  return spec.out;
}

function parseArgs(args: string[]): FigureSpec {
  const opts: Record<string, string> = {};
  for (let i = 0; i < args.length; i += 2) {
    const key = args[i];
    if (!key.startsWith("--") || i + 1 >= args.length) {
      throw new SchemaError(`malformed arguments near ${key}`);
    }
    opts[key.slice(2)] = args[i + 1];
  }
  const kind = opts["kind"] as FigureKind;
  if (!kind || !(kind in RENDERERS)) {
    throw new SchemaError(
      `--kind must be one of ${Object.keys(RENDERERS).join(", ")}`,
    );
  }
  if (!opts["input"] || !opts["out"]) {
    throw new SchemaError("--input and --out are required");
  }
  return {
    kind,
    input: opts["input"],
    trajectory: opts["trajectory"],
    out: opts["out"],
  };
}

export function main(args: string[]): number {
  try {
    const out = render(parseArgs(args));
    stdout.write(`wrote ${out}\n`);
    return 0;
  } catch (e) {
    if (e instanceof SchemaError) {
      stderr.write(`schema error: ${e.message}\n`);
      return 1;
    }
    throw e;
  }
}

if (import.meta.url === `file://${argv[1]}`) {
  exit(main(argv.slice(2)));
}
