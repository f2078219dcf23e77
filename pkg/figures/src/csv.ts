/**
 * Reader for ditherseek trajectory CSVs: '#'-prefixed metadata lines
 * (key=value tokens), a header row, then numeric rows.
 */
import { readFileSync } from "fs";

export interface RunData {
  meta: Record<string, string>;
  columns: Record<string, number[]>;
  path: string;
}

export function parseRun(path: string): RunData {
  const text = readFileSync(path, "utf-8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  const meta: Record<string, string> = {};
  let i = 0;
  for (; i < lines.length && lines[i].startsWith("#"); i++) {
    for (const token of lines[i].slice(1).trim().split(/\s+/)) {
      const eq = token.indexOf("=");
      if (eq > 0) meta[token.slice(0, eq)] = token.slice(eq + 1);
    }
  }
  if (i >= lines.length) {
    throw new Error(`empty run file: ${path}`);
  }
  const header = lines[i].split(",");
  const rows = lines.slice(i + 1);
  if (rows.length === 0) {
    throw new Error(`run file has no data rows: ${path}`);
  }
  const columns: Record<string, number[]> = {};
  for (const name of header) columns[name] = [];
  for (const row of rows) {
    const parts = row.split(",");
    if (parts.length !== header.length) {
      throw new Error(`ragged row in ${path}: ${row}`);
    }
    for (let j = 0; j < header.length; j++) {
      const v = Number(parts[j]);
      if (Number.isNaN(v)) throw new Error(`non-numeric cell in ${path}: ${parts[j]}`);
      columns[header[j]].push(v);
    }
  }
  return { meta, columns, path };
}

export function requireColumns(run: RunData, names: string[]): void {
  for (const name of names) {
    if (!(name in run.columns)) {
      throw new Error(`run file ${run.path} is missing column '${name}'`);
    }
  }
}
