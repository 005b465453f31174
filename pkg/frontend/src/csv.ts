/**
 * Reader for the experiment result tables emitted by the privtrim CLI.
 *
 * Long format, one row per (algorithm, m); empty cells mean "not applicable"
 * (e.g. t_best for the non-private rows). Numbers are kept exactly as
 * parsed: the renderer never recomputes them.
 */

export const REQUIRED_COLUMNS = [
  "algorithm",
  "n",
  "eps",
  "m",
  "t_best",
  "s",
  "shape",
  "excess_var",
  "stderr",
  "reps",
  "seed",
] as const;

export interface ResultRow {
  algorithm: string;
  n: number;
  eps: number;
  m: number;
  tBest: number | null;
  s: number | null;
  shape: number | null;
  excessVar: number;
  stderr: number;
  reps: number;
  seed: number;
}

export class SchemaError extends Error {
  readonly missing: string[];

  constructor(missing: string[]) {
    super(`CSV is missing required columns: ${missing.join(", ")}`);
    this.name = "SchemaError";
    this.missing = missing;
  }
}

function toNumber(field: string, raw: string, line: number): number {
  const value = Number(raw);
  if (raw === "" || Number.isNaN(value)) {
    throw new Error(`line ${line}: column ${field} is not numeric: ${JSON.stringify(raw)}`);
  }
  return value;
}

function toOptional(raw: string, field: string, line: number): number | null {
  return raw === "" ? null : toNumber(field, raw, line);
}

export function parseResultCsv(text: string): ResultRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError([...REQUIRED_COLUMNS]);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const index = new Map(header.map((name, i) => [name, i]));
  const missing = REQUIRED_COLUMNS.filter((c) => !index.has(c));
  if (missing.length > 0) {
    throw new SchemaError(missing);
  }

  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    const cell = (name: string): string => parts[index.get(name)!] ?? "";
    const lineNo = i + 1;
    rows.push({
      algorithm: cell("algorithm"),
      n: toNumber("n", cell("n"), lineNo),
      eps: toNumber("eps", cell("eps"), lineNo),
      m: toNumber("m", cell("m"), lineNo),
      tBest: toOptional(cell("t_best"), "t_best", lineNo),
      s: toOptional(cell("s"), "s", lineNo),
      shape: toOptional(cell("shape"), "shape", lineNo),
      excessVar: toNumber("excess_var", cell("excess_var"), lineNo),
      stderr: toNumber("stderr", cell("stderr"), lineNo),
      reps: toNumber("reps", cell("reps"), lineNo),
      seed: toNumber("seed", cell("seed"), lineNo),
    });
  }
  return rows;
}
