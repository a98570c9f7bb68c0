/**
 * Figure specification files: which CSVs to read, how to draw each series.
 * One JSON spec per checked-in figure; `npm run figures` replays them all.
 */
import { readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { z } from "zod";

const MARKERS = ["line", "dashed", "dots", "circles", "crosses", "diamonds"] as const;
export type Marker = (typeof MARKERS)[number];

const StyleSchema = z.object({
  label: z.string(),
  marker: z.enum(MARKERS).default("line"),
  color: z.string().default("#333333"),
});

const FigureSpecSchema = z.object({
  kind: z.enum(["sweep", "psi", "heatmap"]),
  inputs: z.array(z.string()).nonempty(),
  output: z.string().optional(),
  title: z.string().default(""),
  xLabel: z.string().default(""),
  yLabel: z.string().default(""),
  xScale: z.enum(["linear", "log"]).default("linear"),
  // series styling keyed by method name; unstyled methods get defaults
  styles: z.record(z.string(), StyleSchema).default({}),
  // heatmap panel order, one panel per method; defaults to CSV order
  panels: z.array(z.string()).optional(),
});

export type SeriesStyle = z.infer<typeof StyleSchema>;
export type FigureSpec = z.infer<typeof FigureSpecSchema>;

export class SpecError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SpecError";
  }
}

/** Load and validate a spec file; input paths resolve relative to it. */
export function loadSpec(path: string): FigureSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (e) {
    throw new SpecError(`cannot read spec ${path}: ${(e as Error).message}`);
  }
  const result = FigureSpecSchema.safeParse(raw);
  if (!result.success) {
    const detail = result.error.issues
      .map((i) => `${i.path.join(".") || "(root)"}: ${i.message}`)
      .join("; ");
    throw new SpecError(`invalid spec ${path}: ${detail}`);
  }
  const spec = result.data;
  const base = dirname(path);
  return {
    ...spec,
    inputs: spec.inputs.map((p) => resolve(base, p)) as [string, ...string[]],
    output: spec.output === undefined ? undefined : resolve(base, spec.output),
  };
}

export function styleFor(spec: FigureSpec, method: string): SeriesStyle {
  return spec.styles[method] ?? { label: method, marker: "line", color: "#333333" };
}
