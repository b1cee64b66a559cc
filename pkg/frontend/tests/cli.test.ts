import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { main } from "../src/cli";

const fx = (name: string) => join(__dirname, "fixtures", name);

let errors: string[];
let logs: string[];

beforeEach(() => {
  errors = [];
  logs = [];
  vi.spyOn(console, "error").mockImplementation((msg) => errors.push(String(msg)));
  vi.spyOn(console, "log").mockImplementation((msg) => logs.push(String(msg)));
});

afterEach(() => {
  vi.restoreAllMocks();
});

describe("vdplot", () => {
  it("renders every figure kind from the golden tables", () => {
    const out = mkdtempSync(join(tmpdir(), "vdplot-"));
    const jobs: Array<[string, string]> = [
      ["loglog-convergence", "convergence.csv"],
      ["profile", "lambda_profile.csv"],
      ["landscape", "mass_landscape.csv"],
      ["dispersion", "dispersion.csv"],
      ["limit-extrapolation", "neutrino.csv"],
    ];
    for (const [kind, file] of jobs) {
      const img = join(out, `${kind}.svg`);
      expect(main([kind, "--in", fx(file), "--out", img])).toBe(0);
      expect(existsSync(img)).toBe(true);
      expect(readFileSync(img, "utf8")).toContain("</svg>");
    }
    expect(logs.length).toBe(jobs.length);
  });

  it("writes byte-identical figures for identical inputs", () => {
    const out = mkdtempSync(join(tmpdir(), "vdplot-"));
    const a = join(out, "a.svg");
    const b = join(out, "b.svg");
    expect(main(["profile", "--in", fx("lambda_profile.csv"), "--out", a])).toBe(0);
    expect(main(["profile", "--in", fx("lambda_profile.csv"), "--out", b])).toBe(0);
    expect(readFileSync(a, "utf8")).toBe(readFileSync(b, "utf8"));
  });

  it("accepts an overlay table via --in2", () => {
    const out = mkdtempSync(join(tmpdir(), "vdplot-"));
    const img = join(out, "d.svg");
    const rc = main([
      "dispersion",
      "--in", fx("dispersion.csv"),
      "--in2", fx("dispersion_massless.csv"),
      "--out", img,
    ]);
    expect(rc).toBe(0);
    expect(readFileSync(img, "utf8")).toContain("table 2");
  });

  it("rejects schema mismatches with exit 2 and column diagnostics", () => {
    const out = mkdtempSync(join(tmpdir(), "vdplot-"));
    const rc = main(["landscape", "--in", fx("convergence.csv"), "--out", join(out, "x.svg")]);
    expect(rc).toBe(2);
    expect(errors.join(" ")).toContain("missing column(s)");
    expect(errors.join(" ")).toContain("complex_flag");
    expect(existsSync(join(out, "x.svg"))).toBe(false);
  });

  it("rejects a mismatched --in2 table the same way", () => {
    const out = mkdtempSync(join(tmpdir(), "vdplot-"));
    const rc = main([
      "dispersion",
      "--in", fx("dispersion.csv"),
      "--in2", fx("lambda_profile.csv"),
      "--out", join(out, "x.svg"),
    ]);
    expect(rc).toBe(2);
    expect(errors.join(" ")).toContain("does not match the dispersion schema");
  });

  it("rejects malformed CSV bodies with exit 2", () => {
    const out = mkdtempSync(join(tmpdir(), "vdplot-"));
    const bad = join(out, "bad.csv");
    writeFileSync(bad, "x,lambda\n1.0\n");
    const rc = main(["profile", "--in", bad, "--out", join(out, "x.svg")]);
    expect(rc).toBe(2);
    expect(errors.join(" ")).toContain("expected 2 cells");
  });

  it("exits 1 on usage errors", () => {
    expect(main([])).toBe(1);
    expect(main(["profile"])).toBe(1);
    expect(main(["profile", "--in", fx("lambda_profile.csv")])).toBe(1);
    expect(main(["profile", "--in", fx("lambda_profile.csv"), "--flip", "x", "--out", "y"])).toBe(1);
    expect(errors.some((e) => e.includes("usage: vdplot"))).toBe(true);
  });

  it("exits 1 on an unknown figure kind, listing the valid ones", () => {
    expect(main(["piechart", "--in", fx("convergence.csv"), "--out", "/tmp/x.svg"])).toBe(1);
    expect(errors.join(" ")).toContain("loglog-convergence");
  });

  it("exits 1 when the input file does not exist", () => {
    expect(main(["profile", "--in", "/nonexistent.csv", "--out", "/tmp/x.svg"])).toBe(1);
  });
});
