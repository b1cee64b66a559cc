/**
 * The five figure kinds.
 *
 * Every renderer draws exactly what the runner computed -- no physics is
 * recomputed here.  The closed-form dispersion overlay, for instance, is
 * the E_closed column of the table, not a formula evaluated locally.
 */

import { Table, column } from "./csv";
import { fitLogLogSlope } from "./fit";
import { FigureKind, probeColumns } from "./schema";
import {
  AxisSpec,
  HEIGHT,
  MARGIN,
  PALETTE,
  SvgCanvas,
  WIDTH,
  decadeTicks,
  drawFrame,
  legend,
  linearScale,
  logScale,
  niceTicks,
  padDomain,
} from "./svg";

export class FigureError extends Error {}

export interface FigureSpec {
  kind: FigureKind;
  input: Table;
  /** Optional second table of the same schema, drawn as an overlay. */
  input2?: Table;
}

const X0 = MARGIN.left;
const X1 = WIDTH - MARGIN.right;
const Y0 = HEIGHT - MARGIN.bottom;
const Y1 = MARGIN.top;

const finite = (vs: number[]): number[] => vs.filter((v) => Number.isFinite(v));

function extent(vs: number[]): [number, number] {
  const f = finite(vs);
  if (f.length === 0) throw new FigureError("no finite values to plot");
  return [Math.min(...f), Math.max(...f)];
}

export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "loglog-convergence":
      return renderConvergence(spec);
    case "profile":
      return renderProfile(spec);
    case "landscape":
      return renderLandscape(spec);
    case "dispersion":
      return renderDispersion(spec);
    case "limit-extrapolation":
      return renderLimit(spec);
  }
}

function singleInputOnly(spec: FigureSpec): void {
  if (spec.input2 !== undefined) {
    throw new FigureError(`figure kind '${spec.kind}' takes a single input table`);
  }
}

// -- loglog-convergence -----------------------------------------------------

function renderConvergence(spec: FigureSpec): string {
  const tables = spec.input2 ? [spec.input, spec.input2] : [spec.input];
  const series = tables.map((t, i) => {
    const h = column(t, "h");
    const r = column(t, "residual");
    if (h.some((v) => !(v > 0)) || r.some((v) => !(v > 0))) {
      throw new FigureError(
        "log-log axes need positive h and residual values in every row",
      );
    }
    return { h, r, fit: fitLogLogSlope(h, r), color: PALETTE[i] };
  });

  const hAll = series.flatMap((s) => s.h);
  const rAll = series.flatMap((s) => s.r);
  const [h0, h1] = [Math.min(...hAll) / 1.3, Math.max(...hAll) * 1.3];
  const [r0, r1] = [Math.min(...rAll) / 2, Math.max(...rAll) * 2];
  const xs = logScale(h0, h1, X0, X1);
  const ys = logScale(r0, r1, Y0, Y1);

  const c = new SvgCanvas();
  drawFrame(c, {
    xTicks: decadeTicks(h0, h1),
    yTicks: decadeTicks(r0, r1),
    xScale: xs,
    yScale: ys,
    xLabel: "grid spacing h",
    yLabel: "residual",
    title: "convergence under refinement",
  } satisfies AxisSpec);

  for (const s of series) {
    const pts = s.h.map((hi, j) => [xs(hi), ys(s.r[j])] as [number, number]);
    c.polyline(pts, s.color);
    for (const [px, py] of pts) c.circle(px, py, 4, s.color);
  }
  legend(
    c,
    series.map((s, i) => ({
      label: `series ${i + 1}: slope ${s.fit.slope.toFixed(2)}`,
      color: s.color,
    })),
  );
  c.text(X0 + 12, Y1 + 20, `fitted slope ${series[0].fit.slope.toFixed(2)} (finer levels)`, {
    size: 14,
    fill: "#1f1f1f",
  });
  return c.render();
}

// -- profile ----------------------------------------------------------------

function renderProfile(spec: FigureSpec): string {
  singleInputOnly(spec);
  const x = column(spec.input, "x");
  const lam = column(spec.input, "lambda");
  const [dx0, dx1] = padDomain(...extent(x));
  const [dy0, dy1] = padDomain(...extent(lam));
  const xs = linearScale(dx0, dx1, X0, X1);
  const ys = linearScale(dy0, dy1, Y0, Y1);

  const c = new SvgCanvas();
  drawFrame(c, {
    xTicks: niceTicks(dx0, dx1),
    yTicks: niceTicks(dy0, dy1),
    xScale: xs,
    yScale: ys,
    xLabel: "x",
    yLabel: "lambda",
    title: "multiplier-field profile",
  });
  c.polyline(x.map((xi, j) => [xs(xi), ys(lam[j])]), PALETTE[0], 2);
  return c.render();
}

// -- landscape --------------------------------------------------------------

function renderLandscape(spec: FigureSpec): string {
  singleInputOnly(spec);
  const t = spec.input;
  const x = column(t, "x");
  const closed = column(t, "m2_closed");
  const conformal = column(t, "m2_conformal");
  const flag = column(t, "complex_flag");

  const [dx0, dx1] = padDomain(...extent(x));
  const [dy0, dy1] = padDomain(...extent([...finite(closed), ...finite(conformal)]));
  const xs = linearScale(dx0, dx1, X0, X1);
  const ys = linearScale(dy0, dy1, Y0, Y1);

  const c = new SvgCanvas();
  // complex-mass shading first, so the curves draw on top of it
  for (const [a, b] of flaggedRuns(x, flag)) {
    c.rect(xs(a), Y1, xs(b) - xs(a), Y0 - Y1, "#f4c7c3", 0.6);
  }
  drawFrame(c, {
    xTicks: niceTicks(dx0, dx1),
    yTicks: niceTicks(dy0, dy1),
    xScale: xs,
    yScale: ys,
    xLabel: "x",
    yLabel: "m2",
    title: "induced mass-squared landscape",
  });
  c.polyline(x.map((xi, j) => [xs(xi), ys(closed[j])]), PALETTE[0], 2);
  c.polyline(x.map((xi, j) => [xs(xi), ys(conformal[j])]), PALETTE[1], 2, "6 3");
  legend(c, [
    { label: "m2 closed form", color: PALETTE[0] },
    { label: "m2 conformal form", color: PALETTE[1] },
    { label: "complex-mass region", color: "#f4c7c3" },
  ]);
  return c.render();
}

/** Contiguous runs where flag != 0, as [xStart, xEnd] with half-cell margins. */
function flaggedRuns(x: number[], flag: number[]): Array<[number, number]> {
  const runs: Array<[number, number]> = [];
  const half = x.length > 1 ? (x[1] - x[0]) / 2 : 0;
  let start: number | null = null;
  for (let i = 0; i <= x.length; i++) {
    const on = i < x.length && flag[i] !== 0;
    if (on && start === null) start = x[i] - half;
    if (!on && start !== null) {
      runs.push([start, x[i - 1] + half]);
      start = null;
    }
  }
  return runs;
}

// -- dispersion -------------------------------------------------------------

function renderDispersion(spec: FigureSpec): string {
  const tables = spec.input2 ? [spec.input, spec.input2] : [spec.input];
  const k0 = tables.flatMap((t) => column(t, "k"));
  const eAll = tables.flatMap((t) => [...column(t, "E_numeric"), ...column(t, "E_closed")]);
  const [dx0, dx1] = padDomain(...extent(k0));
  const [dy0, dy1] = padDomain(Math.min(0, ...finite(eAll)), Math.max(...finite(eAll)));
  const xs = linearScale(dx0, dx1, X0, X1);
  const ys = linearScale(dy0, dy1, Y0, Y1);

  const c = new SvgCanvas();
  drawFrame(c, {
    xTicks: niceTicks(dx0, dx1),
    yTicks: niceTicks(dy0, dy1),
    xScale: xs,
    yScale: ys,
    xLabel: "k",
    yLabel: "E(k)",
    title: "dispersion with constant vacuum mass",
  });

  const entries: Array<{ label: string; color: string }> = [];
  tables.forEach((t, i) => {
    const k = column(t, "k");
    const closed = column(t, "E_closed");
    const numeric = column(t, "E_numeric");
    const lineColor = PALETTE[2 * i + 1];
    const dotColor = PALETTE[2 * i];
    c.polyline(k.map((ki, j) => [xs(ki), ys(closed[j])]), lineColor, 2);
    for (let j = 0; j < k.length; j++) c.circle(xs(k[j]), ys(numeric[j]), 3, dotColor);
    const tag = tables.length > 1 ? ` (table ${i + 1})` : "";
    entries.push({ label: `E computed${tag}`, color: dotColor });
    entries.push({ label: `E closed form${tag}`, color: lineColor });
  });
  legend(c, entries);
  return c.render();
}

// -- limit-extrapolation ----------------------------------------------------

function renderLimit(spec: FigureSpec): string {
  singleInputOnly(spec);
  const t = spec.input;
  const m = column(t, "m");
  const flag = column(t, "is_extrapolation");
  const probes = probeColumns(t.header);

  const yAll = probes.flatMap((p) => finite(column(t, p)));
  if (yAll.length === 0) throw new FigureError("no finite probe values to plot");
  const [dx0, dx1] = padDomain(0, Math.max(...finite(m)));
  const [dy0, dy1] = padDomain(Math.min(...yAll), Math.max(...yAll));
  const xs = linearScale(dx0, dx1, X0, X1);
  const ys = linearScale(dy0, dy1, Y0, Y1);

  const c = new SvgCanvas();
  drawFrame(c, {
    xTicks: niceTicks(dx0, dx1),
    yTicks: niceTicks(dy0, dy1),
    xScale: xs,
    yScale: ys,
    xLabel: "bare mass m",
    yLabel: "vacuum mass probe",
    title: "vanishing-mass limit",
  });
  c.line(xs(0), Y0, xs(0), Y1, "#999999", 1, "4 3");

  probes.forEach((name, i) => {
    const vals = column(t, name);
    const swept = m
      .map((mi, j) => ({ m: mi, v: vals[j], extra: flag[j] !== 0 }))
      .filter((p) => !p.extra)
      .sort((a, b) => a.m - b.m);
    c.polyline(swept.map((p) => [xs(p.m), ys(p.v)] as [number, number]), PALETTE[i], 1.5);
    for (const p of swept) c.circle(xs(p.m), ys(p.v), 3.5, PALETTE[i]);
    m.forEach((mi, j) => {
      if (flag[j] !== 0) c.diamond(xs(mi), ys(vals[j]), 6, PALETTE[i]);
    });
  });
  legend(
    c,
    probes.map((name, i) => ({ label: name.replace("M_probe", "probe "), color: PALETTE[i] })),
  );
  const hasExtra = flag.some((f) => f !== 0);
  if (hasExtra) {
    c.text(X0 + 12, Y1 + 20, "diamonds: extrapolated m = 0 limit", { size: 13 });
  }
  return c.render();
}
