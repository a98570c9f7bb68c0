import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { main } from "../src/cli.js";
import { SCHEMAS } from "../src/schema.js";

let dir: string;
let stderrLines: string[];
let stdoutLines: string[];

beforeEach(() => {
  dir = mkdtempSync(join(tmpdir(), "figures-"));
  stderrLines = [];
  stdoutLines = [];
  vi.spyOn(process.stderr, "write").mockImplementation((s) => {
    stderrLines.push(String(s));
    return true;
  });
  vi.spyOn(process.stdout, "write").mockImplementation((s) => {
    stdoutLines.push(String(s));
    return true;
  });
});

afterEach(() => {
  vi.restoreAllMocks();
});

function writeSpec(name: string, body: Record<string, unknown>): string {
  const path = join(dir, name);
  writeFileSync(path, JSON.stringify(body));
  return path;
}

function writeSweepCsv(name: string, rows: string[]): string {
  const path = join(dir, name);
  writeFileSync(path, [SCHEMAS.sweep.join(","), ...rows].join("\n"));
  return path;
}

describe("render CLI", () => {
  it("writes an SVG and reports counts", () => {
    writeSweepCsv("d.csv", ["1,3,1,5,1,var2,-0.30,,", "1,3,1,5,2,var2,-0.31,,"]);
    const spec = writeSpec("s.json", { kind: "sweep", inputs: ["d.csv"] });
    const out = join(dir, "fig.svg");
    expect(main(["render", "--spec", spec, "--out", out])).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("<svg");
    expect(stdoutLines.join("")).toContain("1 series, 2 points");
  });

  it("uses the spec's output path when --out is absent", () => {
    writeSweepCsv("d.csv", ["1,3,1,5,1,var2,-0.30,,"]);
    const spec = writeSpec("s.json", { kind: "sweep", inputs: ["d.csv"], output: "fig.svg" });
    expect(main(["--spec", spec])).toBe(0);
    expect(existsSync(join(dir, "fig.svg"))).toBe(true);
  });

  it("exits 2 without a spec", () => {
    expect(main([])).toBe(2);
    expect(stderrLines.join("")).toContain("usage");
  });

  it("exits 2 on an unknown subcommand", () => {
    expect(main(["plot", "--spec", "x"])).toBe(2);
  });

  it("exits 1 with a column diff on schema mismatch, writing nothing", () => {
    const csv = join(dir, "bad.csv");
    writeFileSync(csv, "epsilon,delta,beta,omega_c,gamma,method,value,stderr,flags\n1,3,1,5,1,var2,-0.3,,");
    const spec = writeSpec("s.json", { kind: "sweep", inputs: ["bad.csv"] });
    const out = join(dir, "fig.svg");
    expect(main(["--spec", spec, "--out", out])).toBe(1);
    const err = stderrLines.join("");
    expect(err).toContain("missing: sigma_z");
    expect(err).toContain("unexpected: value");
    expect(existsSync(out)).toBe(false);
  });

  it("exits 1 on an empty CSV, writing nothing", () => {
    const csv = join(dir, "empty.csv");
    writeFileSync(csv, "");
    const spec = writeSpec("s.json", { kind: "sweep", inputs: ["empty.csv"] });
    const out = join(dir, "fig.svg");
    expect(main(["--spec", spec, "--out", out])).toBe(1);
    expect(stderrLines.join("")).toContain("empty CSV");
    expect(existsSync(out)).toBe(false);
  });

  it("exits 1 on an invalid spec file", () => {
    const spec = writeSpec("s.json", { kind: "scatter", inputs: ["d.csv"] });
    expect(main(["--spec", spec, "--out", join(dir, "f.svg")])).toBe(1);
    expect(stderrLines.join("")).toContain("invalid spec");
  });

  it("exits 1 when an input CSV is missing", () => {
    const spec = writeSpec("s.json", { kind: "sweep", inputs: ["nope.csv"] });
    expect(main(["--spec", spec, "--out", join(dir, "f.svg")])).toBe(1);
  });

  it("exits 2 when no output path is available anywhere", () => {
    writeSweepCsv("d.csv", ["1,3,1,5,1,var2,-0.30,,"]);
    const spec = writeSpec("s.json", { kind: "sweep", inputs: ["d.csv"] });
    expect(main(["--spec", spec])).toBe(2);
    expect(stderrLines.join("")).toContain("no output path");
  });
});
