/** CSV reader for dunkl CLI outputs: "# key: value" comment headers,
 *  one column-name row, then numeric/text data rows. */

import { readFileSync } from "node:fs";

export interface CsvTable {
  /** key/value pairs from the leading comment block */
  header: Record<string, string>;
  columns: string[];
  /** numeric view; non-numeric cells become NaN */
  rows: number[][];
  /** raw string cells, same shape as rows */
  raw: string[][];
}

export function readCsv(path: string): CsvTable {
  const text = readFileSync(path, "utf8");
  const header: Record<string, string> = {};
  const lines = text.split(/\r?\n/);
  let i = 0;
  for (; i < lines.length; i++) {
    const line = lines[i];
    if (!line.startsWith("#")) break;
    const m = line.slice(1).match(/^\s*([^:]+):\s*(.*)$/);
    if (m) header[m[1].trim()] = m[2].trim();
  }
  if (i >= lines.length || lines[i].trim() === "") {
    throw new Error(`no column row in ${path}`);
  }
  const columns = lines[i].split(",").map((c) => c.trim());
  const raw: string[][] = [];
  const rows: number[][] = [];
  for (i += 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const cells = line.split(",");
    raw.push(cells);
    rows.push(cells.map((c) => Number(c)));
  }
  return { header, columns, rows, raw };
}

export function column(t: CsvTable, name: string): number[] {
  const j = t.columns.indexOf(name);
  if (j < 0) throw new Error(`missing column ${name}`);
  return t.rows.map((r) => r[j]);
}
