/**
 * render --spec <file> --out <file>
 *
 * Reads the CSVs referenced by the spec, validates them against the
 * producer's column schemas, and writes one SVG. Any validation failure
 * exits nonzero before an output file is touched; a schema mismatch
 * prints the column diff.
 */
import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { render } from "./render.js";
import { SchemaError } from "./schema.js";
import { SpecError, loadSpec } from "./spec.js";

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        spec: { type: "string" },
        out: { type: "string" },
      },
      allowPositionals: true,
    });
  } catch (e) {
    process.stderr.write(`${(e as Error).message}\n`);
    return 2;
  }
  const positionals = args.positionals;
  if (positionals.length > 1 || (positionals.length === 1 && positionals[0] !== "render")) {
    process.stderr.write(`unknown command: ${positionals.join(" ")}\n`);
    return 2;
  }
  const specPath = args.values.spec;
  if (specPath === undefined) {
    process.stderr.write("usage: render --spec <file> [--out <file>]\n");
    return 2;
  }

  try {
    const spec = loadSpec(specPath);
    const out = args.values.out ?? spec.output;
    if (out === undefined) {
      process.stderr.write("no output path: pass --out or set \"output\" in the spec\n");
      return 2;
    }
    const texts = spec.inputs.map((p) => readFileSync(p, "utf8"));
    const result = render(spec, texts);
    writeFileSync(out, result.svg);
    process.stdout.write(
      `wrote ${out}: ${result.seriesCount} series, ${result.pointCount} points` +
      (result.maskedCount > 0 ? `, ${result.maskedCount} masked` : "") +
      "\n",
    );
    return 0;
  } catch (e) {
    if (e instanceof SchemaError || e instanceof SpecError) {
      process.stderr.write(`${e.message}\n`);
    } else {
      process.stderr.write(`render failed: ${(e as Error).message}\n`);
    }
    return 1;
  }
}
