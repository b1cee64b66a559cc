import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { CsvError, column, parseCsv } from "../src/csv";

const fixture = (name: string): string =>
  readFileSync(join(__dirname, "fixtures", name), "utf8");

describe("parseCsv", () => {
  it("reads a runner table with full precision", () => {
    const t = parseCsv(fixture("lambda_profile.csv"));
    expect(t.header).toEqual(["x", "lambda"]);
    expect(t.rows.length).toBe(32);
    // 17 significant digits survive the round-trip
    expect(t.rows[0][1]).toBe(0.72226691816944688);
  });

  it("maps nan and inf cells to IEEE values", () => {
    const t = parseCsv("a,b\nnan,inf\n-inf,2.5\n");
    expect(Number.isNaN(t.rows[0][0])).toBe(true);
    expect(t.rows[0][1]).toBe(Infinity);
    expect(t.rows[1][0]).toBe(-Infinity);
  });

  it("keeps the literal nan in the first convergence ratio", () => {
    const t = parseCsv(fixture("convergence.csv"));
    expect(Number.isNaN(column(t, "ratio")[0])).toBe(true);
    expect(column(t, "ratio")[1]).toBeCloseTo(3.97, 2);
  });

  it("rejects ragged rows with the line number", () => {
    expect(() => parseCsv("a,b\n1,2\n3\n")).toThrowError(/line 3: expected 2 cells/);
  });

  it("rejects non-numeric cells naming line and column", () => {
    expect(() => parseCsv("a,b\n1,oops\n")).toThrowError(
      /line 2: cell 'oops' in column 'b'/,
    );
  });

  it("rejects header-only and empty inputs", () => {
    expect(() => parseCsv("a,b\n")).toThrowError(CsvError);
    expect(() => parseCsv("")).toThrowError(CsvError);
  });

  it("rejects empty column names", () => {
    expect(() => parseCsv("a,,c\n1,2,3\n")).toThrowError(/empty column name/);
  });

  it("names unknown columns on access", () => {
    const t = parseCsv("a,b\n1,2\n");
    expect(() => column(t, "z")).toThrowError(/no column named 'z'/);
  });
});
