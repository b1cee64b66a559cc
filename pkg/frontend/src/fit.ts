/**
 * Least-squares slope of log(residual) against log(h).
 *
 * The coarsest level (largest h) is excluded from the fit: it is routinely
 * pre-asymptotic and would bias the estimate the annotation exists to
 * report.  With fewer than three points the exclusion would leave nothing
 * to fit, so the full set is used instead.
 */

export interface SlopeFit {
  slope: number;
  intercept: number;
  pointsUsed: number;
}

export function fitLogLogSlope(h: number[], residual: number[]): SlopeFit {
  if (h.length !== residual.length) throw new Error("h and residual lengths differ");
  const usable = h
    .map((hi, i) => ({ h: hi, r: residual[i] }))
    .filter((p) => Number.isFinite(p.h) && Number.isFinite(p.r) && p.h > 0 && p.r > 0);
  if (usable.length < 2) {
    throw new Error("need at least two finite positive (h, residual) points");
  }
  let points = usable;
  if (usable.length >= 3) {
    const coarsest = usable.reduce((a, b) => (b.h > a.h ? b : a));
    points = usable.filter((p) => p !== coarsest);
  }
  const xs = points.map((p) => Math.log(p.h));
  const ys = points.map((p) => Math.log(p.r));
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) ** 2;
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx === 0) throw new Error("all step sizes equal; slope undefined");
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx, pointsUsed: n };
}
