import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { column, parseCsv } from "../src/csv";
import { FigureError, renderFigure } from "../src/figures";
import { FigureKind } from "../src/schema";

const fixture = (name: string) =>
  parseCsv(readFileSync(join(__dirname, "fixtures", name), "utf8"));

const GOLDEN: Array<[FigureKind, string]> = [
  ["loglog-convergence", "convergence.csv"],
  ["profile", "lambda_profile.csv"],
  ["landscape", "mass_landscape.csv"],
  ["dispersion", "dispersion.csv"],
  ["limit-extrapolation", "neutrino.csv"],
];

describe("renderFigure", () => {
  it.each(GOLDEN)("renders %s from its golden table", (kind, file) => {
    const svg = renderFigure({ kind, input: fixture(file) });
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
    expect(svg).toContain("polyline");
    expect(svg).not.toContain("NaN");
  });

  it.each(GOLDEN)("is deterministic for %s", (kind, file) => {
    const a = renderFigure({ kind, input: fixture(file) });
    const b = renderFigure({ kind, input: fixture(file) });
    expect(a).toBe(b);
  });

  it("annotates second-order convergence with a slope in [1.9, 2.1]", () => {
    const svg = renderFigure({ kind: "loglog-convergence", input: fixture("convergence.csv") });
    const m = svg.match(/fitted slope (\d+\.\d+)/);
    expect(m).not.toBeNull();
    const slope = Number(m![1]);
    expect(slope).toBeGreaterThanOrEqual(1.9);
    expect(slope).toBeLessThanOrEqual(2.1);
  });

  it("rejects nonpositive residuals on log axes", () => {
    const bad = parseCsv("level,h,residual,ratio\n0,0.1,0,nan\n1,0.05,-1,4\n");
    expect(() => renderFigure({ kind: "loglog-convergence", input: bad })).toThrowError(
      /positive h and residual/,
    );
  });

  it("shades complex-mass regions and only them", () => {
    const shadedSvg = renderFigure({
      kind: "landscape",
      input: fixture("mass_landscape_complex.csv"),
    });
    const cleanSvg = renderFigure({ kind: "landscape", input: fixture("mass_landscape.csv") });
    expect(shadedSvg).toContain("#f4c7c3");
    // the clean landscape shows the legend swatch but draws no shading band
    const bands = (svg: string) =>
      svg.split("\n").filter((l) => l.includes("#f4c7c3") && l.includes("fill-opacity"));
    expect(bands(shadedSvg).length).toBeGreaterThan(0);
    expect(bands(cleanSvg).length).toBe(0);
  });

  it("overlays the closed form and a second dispersion table", () => {
    const svg = renderFigure({
      kind: "dispersion",
      input: fixture("dispersion.csv"),
      input2: fixture("dispersion_massless.csv"),
    });
    expect(svg).toContain("E closed form (table 1)");
    expect(svg).toContain("E computed (table 2)");
  });

  it("passes the massless rest energy through untouched", () => {
    // vacuum-coupled massless scan: E(k) -> M as k -> 0; the renderer only
    // draws the runner's numbers, so the table itself carries the property
    const t = fixture("dispersion_massless.csv");
    const k = column(t, "k");
    const e = column(t, "E_numeric");
    const jNearZero = k.reduce((ja, _, j) => (Math.abs(k[j]) < Math.abs(k[ja]) ? j : ja), 0);
    expect(e[jNearZero]).toBeCloseTo(Math.sqrt(k[jNearZero] ** 2 + 0.45 ** 2), 12);
    const svg = renderFigure({ kind: "dispersion", input: t });
    expect(svg).toContain("circle");
  });

  it("draws a dispersion table containing the exact rest point", () => {
    const mu = 0.45;
    const rows = [-1, -0.5, 0, 0.5, 1]
      .map((k) => {
        const eAbs = Math.sqrt(k * k + mu * mu);
        return `${k},${eAbs},${eAbs},0`;
      })
      .join("\n");
    const t = parseCsv(`k,E_numeric,E_closed,abs_gap\n${rows}\n`);
    const svg = renderFigure({ kind: "dispersion", input: t });
    expect(column(t, "E_numeric")[2]).toBe(mu); // curve through (0, mu)
    expect(svg).toContain("polyline");
  });

  it("marks the extrapolated m = 0 row distinctly", () => {
    const svg = renderFigure({ kind: "limit-extrapolation", input: fixture("neutrino.csv") });
    expect(svg).toContain("polygon"); // the diamonds
    expect(svg).toContain("diamonds: extrapolated m = 0 limit");
  });

  it("renders the zero-anchor table as a flat zero line", () => {
    const t = fixture("neutrino_zero.csv");
    for (const name of ["M_probe1", "M_probe2"]) {
      expect(column(t, name).every((v) => v === 0)).toBe(true);
    }
    const svg = renderFigure({ kind: "limit-extrapolation", input: t });
    expect(svg).toContain("polyline");
    expect(svg).not.toContain("NaN");
  });

  it("splits series at failed (nan) rows instead of drawing through them", () => {
    const t = parseCsv(
      "m,M_probe1,is_extrapolation\n0.8,1.5,0\n0.4,nan,0\n0.2,1.1,0\n0.1,1.05,0\n",
    );
    const svg = renderFigure({ kind: "limit-extrapolation", input: t });
    expect(svg).not.toContain("NaN");
  });

  it("refuses a second table for single-input kinds", () => {
    const t = fixture("lambda_profile.csv");
    expect(() => renderFigure({ kind: "profile", input: t, input2: t })).toThrowError(
      FigureError,
    );
  });
});
