/** Render every shipped fixture into out/ (smoke run for all five kinds). */

import { render } from "./index.js";

const FIX = new URL("../fixtures/", import.meta.url).pathname;
const OUT = new URL("../out/", import.meta.url).pathname;

const jobs = [
  { kind: "paths", input: `${FIX}paths.csv`,
    trajectory: `${FIX}trajectory.csv`, out: `${OUT}paths.svg` },
  { kind: "counts", input: `${FIX}trajectory.csv`, out: `${OUT}counts.svg` },
  { kind: "phase", input: `${FIX}phase.csv`, out: `${OUT}phase.svg` },
  { kind: "relax", input: `${FIX}relax.csv`, out: `${OUT}relax.svg` },
  { kind: "spectrum", input: `${FIX}spectrum.csv`, out: `${OUT}spectrum.svg` },
] as const;

for (const j of jobs) {
  console.log("rendered", render({ ...j }));
}
