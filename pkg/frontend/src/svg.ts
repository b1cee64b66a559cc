/**
 * A small deterministic SVG scene builder.
 *
 * Output depends only on the draw calls: fixed canvas, fixed palette,
 * fixed number formatting, no ids, no timestamps.  Rendering the same
 * table twice yields byte-identical markup, which is the property the
 * figure tests pin.
 */

export const STYLE_VERSION = "plotkit-style-1";

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 48, right: 36, bottom: 64, left: 84 } as const;

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

export type Scale = (v: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 === 0 ? 1 : Math.log10(d1) - l0;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

/** Pad a degenerate or tight domain so flat data still gets an axis. */
export function padDomain(lo: number, hi: number): [number, number] {
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.5;
    return [lo - pad, hi + pad];
  }
  const pad = (hi - lo) * 0.06;
  return [lo - pad, hi + pad];
}

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  if (span <= 0 || !Number.isFinite(span)) return [lo];
  const step0 = span / count;
  const mag = 10 ** Math.floor(Math.log10(step0));
  const norm = step0 / mag;
  const step = (norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1) * mag;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); 10 ** e <= hi * (1 + 1e-9); e++) {
    ticks.push(10 ** e);
  }
  return ticks.length > 0 ? ticks : [lo];
}

const fmtCoord = (v: number): string => v.toFixed(2);

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const [mant, exp] = v.toExponential(1).split("e");
    const m = mant.endsWith(".0") ? mant.slice(0, -2) : mant;
    return `${m}e${Number(exp)}`;
  }
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

const escapeText = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class SvgCanvas {
  private parts: string[] = [];

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmtCoord(x1)}" y1="${fmtCoord(y1)}" x2="${fmtCoord(x2)}" y2="${fmtCoord(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  /** Polyline split into segments wherever a coordinate is not finite. */
  polyline(pts: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    let run: string[] = [];
    const flush = () => {
      if (run.length >= 2) {
        this.parts.push(
          `<polyline points="${run.join(" ")}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`,
        );
      }
      run = [];
    };
    for (const [x, y] of pts) {
      if (Number.isFinite(x) && Number.isFinite(y)) run.push(`${fmtCoord(x)},${fmtCoord(y)}`);
      else flush();
    }
    flush();
  }

  circle(x: number, y: number, r: number, fill: string): void {
    if (!Number.isFinite(x) || !Number.isFinite(y)) return;
    this.parts.push(`<circle cx="${fmtCoord(x)}" cy="${fmtCoord(y)}" r="${r}" fill="${fill}"/>`);
  }

  diamond(x: number, y: number, r: number, fill: string): void {
    if (!Number.isFinite(x) || !Number.isFinite(y)) return;
    const pts = [
      `${fmtCoord(x)},${fmtCoord(y - r)}`,
      `${fmtCoord(x + r)},${fmtCoord(y)}`,
      `${fmtCoord(x)},${fmtCoord(y + r)}`,
      `${fmtCoord(x - r)},${fmtCoord(y)}`,
    ].join(" ");
    this.parts.push(`<polygon points="${pts}" fill="${fill}" stroke="#333333" stroke-width="1"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, opacity = 1): void {
    const o = opacity === 1 ? "" : ` fill-opacity="${opacity}"`;
    this.parts.push(
      `<rect x="${fmtCoord(x)}" y="${fmtCoord(y)}" width="${fmtCoord(w)}" height="${fmtCoord(h)}" fill="${fill}"${o}/>`,
    );
  }

  text(
    x: number,
    y: number,
    content: string,
    opts: { size?: number; anchor?: "start" | "middle" | "end"; fill?: string; rotate?: boolean } = {},
  ): void {
    const { size = 13, anchor = "start", fill = "#333333", rotate = false } = opts;
    const tr = rotate ? ` transform="rotate(-90 ${fmtCoord(x)} ${fmtCoord(y)})"` : "";
    this.parts.push(
      `<text x="${fmtCoord(x)}" y="${fmtCoord(y)}" font-family="sans-serif" font-size="${size}" text-anchor="${anchor}" fill="${fill}"${tr}>${escapeText(content)}</text>`,
    );
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<!-- ${STYLE_VERSION} -->`,
      `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
      ...this.parts,
      `</svg>`,
    ].join("\n") + "\n";
  }
}

export interface AxisSpec {
  xTicks: number[];
  yTicks: number[];
  xScale: Scale;
  yScale: Scale;
  xLabel: string;
  yLabel: string;
  title: string;
}

/** Frame, ticks, grid lines, axis labels, and the title. */
export function drawFrame(c: SvgCanvas, a: AxisSpec): void {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  for (const t of a.xTicks) {
    const px = a.xScale(t);
    c.line(px, y0, px, y1, "#dddddd", 1);
    c.line(px, y0, px, y0 + 5, "#333333", 1);
    c.text(px, y0 + 20, tickLabel(t), { anchor: "middle", size: 12 });
  }
  for (const t of a.yTicks) {
    const py = a.yScale(t);
    c.line(x0, py, x1, py, "#dddddd", 1);
    c.line(x0 - 5, py, x0, py, "#333333", 1);
    c.text(x0 - 9, py + 4, tickLabel(t), { anchor: "end", size: 12 });
  }
  c.line(x0, y0, x1, y0, "#333333", 1.5);
  c.line(x0, y0, x0, y1, "#333333", 1.5);
  c.text((x0 + x1) / 2, HEIGHT - 16, a.xLabel, { anchor: "middle" });
  c.text(22, (y0 + y1) / 2, a.yLabel, { anchor: "middle", rotate: true });
  c.text((x0 + x1) / 2, 26, a.title, { anchor: "middle", size: 16 });
}

export function legend(c: SvgCanvas, entries: Array<{ label: string; color: string }>): void {
  const x = WIDTH - MARGIN.right - 190;
  let y = MARGIN.top + 14;
  for (const e of entries) {
    c.rect(x, y - 9, 14, 9, e.color);
    c.text(x + 20, y, e.label, { size: 12 });
    y += 18;
  }
}
