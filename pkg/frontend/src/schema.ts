/** Figure specifications and input-schema validation. */

import { existsSync } from "node:fs";
import { readCsv, CsvTable } from "./csv.js";

export type FigureKind = "paths" | "counts" | "phase" | "relax" | "spectrum";

export class SchemaError extends Error {}

export interface Style {
  width: number;
  height: number;
  margin: number;
  background: string;
  axisColor: string;
  palette: string[];
  markerColor: string;
}

export const DEFAULT_STYLE: Style = {
  width: 640,
  height: 420,
  margin: 52,
  background: "#ffffff",
  axisColor: "#333333",
  palette: [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
  ],
  markerColor: "#111111",
};

export interface FigureSpec {
  kind: FigureKind;
  /** main table: paths.csv / trajectory.csv / phase.csv / relax.csv / spectrum.csv */
  input: string;
  /** trajectory.csv companion, required for kind=paths */
  trajectory?: string;
  out: string;
  style?: Partial<Style>;
}

const REQUIRED_COLUMNS: Record<FigureKind, string[]> = {
  paths: ["t", "x_1"],
  counts: ["t", "event_root_i", "event_root_j"],
  phase: ["N", "beta", "rate_per_particle", "theory"],
  relax: ["t", "tau_index", "p_emp", "p_theory"],
  spectrum: ["index", "eigenvalue", "multiplicity_group"],
};

export interface LoadedInputs {
  table: CsvTable;
  trajectory?: CsvTable;
  style: Style;
}

export function loadInputs(spec: FigureSpec): LoadedInputs {
  if (!REQUIRED_COLUMNS[spec.kind]) {
    throw new SchemaError(`unknown figure kind ${String(spec.kind)}`);
  }
  if (!existsSync(spec.input)) {
    throw new SchemaError(`input not found: ${spec.input}`);
  }
  const table = readCsv(spec.input);
  for (const c of REQUIRED_COLUMNS[spec.kind]) {
    if (!table.columns.includes(c)) {
      throw new SchemaError(
        `input schema does not match kind=${spec.kind}: missing column ${c}`,
      );
    }
  }
  let trajectory: CsvTable | undefined;
  if (spec.kind === "paths") {
    if (!spec.trajectory) {
      throw new SchemaError("kind=paths needs a trajectory file");
    }
    if (!existsSync(spec.trajectory)) {
      throw new SchemaError(`trajectory not found: ${spec.trajectory}`);
    }
    trajectory = readCsv(spec.trajectory);
    for (const c of REQUIRED_COLUMNS.counts) {
      if (!trajectory.columns.includes(c)) {
        throw new SchemaError(`trajectory schema: missing column ${c}`);
      }
    }
  }
  if (spec.kind === "relax" && !("fitted_exponent" in table.header)) {
    throw new SchemaError("relax input lacks the fitted_exponent header");
  }
  return { table, trajectory, style: { ...DEFAULT_STYLE, ...spec.style } };
}
