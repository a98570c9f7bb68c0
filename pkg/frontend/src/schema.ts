/**
 * CSV parsing against the solver's fixed column schemas.
 *
 * The producing CLI writes one schema per figure kind, bit-exact column
 * order. A header that deviates in any way is a hard error carrying the
 * column diff, so a renamed or reordered column never renders silently.
 */
import Papa from "papaparse";

export type FigureKind = "sweep" | "psi" | "heatmap";

export const SCHEMAS: Record<FigureKind, readonly string[]> = {
  sweep: [
    "epsilon", "delta", "beta", "omega_c", "gamma",
    "method", "sigma_z", "stderr", "flags",
  ],
  psi: [
    "epsilon", "delta", "beta", "omega_c", "gamma",
    "B", "psi", "flags",
  ],
  heatmap: [
    "epsilon", "delta", "beta", "omega_c", "gamma",
    "method", "rel_error", "ref_sigma_z", "ref_stderr", "flags",
  ],
};

export class SchemaError extends Error {
  constructor(message: string, readonly columnDiff?: string) {
    super(columnDiff ? `${message}\n${columnDiff}` : message);
    this.name = "SchemaError";
  }
}

interface BaseRow {
  epsilon: number;
  delta: number;
  beta: number;
  omega_c: number;
  gamma: number;
  flags: string[];
}

export interface SweepRow extends BaseRow {
  method: string;
  sigma_z: number | null;
  stderr: number | null;
}

export interface PsiRow extends BaseRow {
  B: number;
  psi: number;
}

export interface HeatmapRow extends BaseRow {
  method: string;
  rel_error: number | null;
  ref_sigma_z: number | null;
  ref_stderr: number | null;
}

export type Row = SweepRow | PsiRow | HeatmapRow;

// sigma_z and the reference columns are empty for failed rows; stderr is
// empty for every deterministic method.
const NULLABLE = new Set(["sigma_z", "stderr", "rel_error", "ref_sigma_z", "ref_stderr"]);

function diffColumns(expected: readonly string[], got: string[]): string | null {
  if (expected.length === got.length && expected.every((c, i) => c === got[i])) {
    return null;
  }
  const missing = expected.filter((c) => !got.includes(c));
  const unexpected = got.filter((c) => !expected.includes(c));
  const parts = [];
  if (missing.length > 0) parts.push(`missing: ${missing.join(", ")}`);
  if (unexpected.length > 0) parts.push(`unexpected: ${unexpected.join(", ")}`);
  if (parts.length === 0) parts.push("columns out of order");
  parts.push(`expected: ${expected.join(",")}`);
  parts.push(`got:      ${got.join(",")}`);
  return parts.join("\n");
}

function parseCell(column: string, raw: string, line: number): number | string[] | null {
  if (column === "flags") {
    return raw === "" ? [] : raw.split(";");
  }
  if (raw === "") {
    if (NULLABLE.has(column)) return null;
    throw new SchemaError(`line ${line}: empty value in required column ${column}`);
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`line ${line}: cannot parse ${column}=${JSON.stringify(raw)}`);
  }
  return value;
}

/** Parse CSV text against the schema for `kind`. Throws SchemaError. */
export function parseTable(text: string, kind: FigureKind): Row[] {
  // the producer may prepend a "# generated <timestamp>" comment
  const lines = text.split(/\r?\n/).filter((l) => l !== "" && !l.startsWith("#"));
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  const parsed = Papa.parse<string[]>(lines.join("\n"), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`CSV parse error at row ${e.row}: ${e.message}`);
  }
  const [header, ...records] = parsed.data;
  const expected = SCHEMAS[kind];
  const diff = diffColumns(expected, header);
  if (diff !== null) {
    throw new SchemaError(`header does not match the ${kind} schema`, diff);
  }
  if (records.length === 0) {
    throw new SchemaError("empty CSV: header but no data rows");
  }
  return records.map((cells, i) => {
    if (cells.length !== expected.length) {
      throw new SchemaError(
        `line ${i + 2}: ${cells.length} fields, schema has ${expected.length}`,
      );
    }
    const row: Record<string, unknown> = {};
    cells.forEach((raw, j) => {
      const column = expected[j];
      if (column === "method") {
        row[column] = raw;
      } else {
        row[column] = parseCell(column, raw, i + 2);
      }
    });
    return row as unknown as Row;
  });
}
