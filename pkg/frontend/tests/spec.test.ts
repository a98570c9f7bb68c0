import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { isAbsolute, join } from "node:path";
import { describe, expect, it } from "vitest";
import { SpecError, loadSpec, styleFor } from "../src/spec.js";

function write(dir: string, body: unknown): string {
  const path = join(dir, "spec.json");
  writeFileSync(path, JSON.stringify(body));
  return path;
}

describe("loadSpec", () => {
  it("applies defaults and resolves inputs relative to the spec file", () => {
    const dir = mkdtempSync(join(tmpdir(), "spec-"));
    const spec = loadSpec(write(dir, { kind: "sweep", inputs: ["data/x.csv"] }));
    expect(spec.xScale).toBe("linear");
    expect(spec.styles).toEqual({});
    expect(isAbsolute(spec.inputs[0])).toBe(true);
    expect(spec.inputs[0]).toBe(join(dir, "data", "x.csv"));
  });

  it("resolves the output path when present", () => {
    const dir = mkdtempSync(join(tmpdir(), "spec-"));
    const spec = loadSpec(write(dir, { kind: "psi", inputs: ["x.csv"], output: "out/f.svg" }));
    expect(spec.output).toBe(join(dir, "out", "f.svg"));
  });

  it("rejects an unknown figure kind", () => {
    const dir = mkdtempSync(join(tmpdir(), "spec-"));
    expect(() => loadSpec(write(dir, { kind: "scatter", inputs: ["x.csv"] }))).toThrow(SpecError);
  });

  it("rejects an empty input list", () => {
    const dir = mkdtempSync(join(tmpdir(), "spec-"));
    expect(() => loadSpec(write(dir, { kind: "sweep", inputs: [] }))).toThrow(SpecError);
  });

  it("rejects malformed JSON with a readable error", () => {
    const dir = mkdtempSync(join(tmpdir(), "spec-"));
    const path = join(dir, "broken.json");
    writeFileSync(path, "{ not json");
    expect(() => loadSpec(path)).toThrow(/cannot read spec/);
  });

  it("fills default styling for unknown methods", () => {
    const dir = mkdtempSync(join(tmpdir(), "spec-"));
    const spec = loadSpec(write(dir, {
      kind: "sweep",
      inputs: ["x.csv"],
      styles: { var2: { label: "variational" } },
    }));
    expect(styleFor(spec, "var2").label).toBe("variational");
    expect(styleFor(spec, "var2").marker).toBe("line");
    expect(styleFor(spec, "orig2").label).toBe("orig2");
  });
});
