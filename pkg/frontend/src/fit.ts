/**
 * Least-squares line fit used for the dip-curve guide.
 *
 * The guide is S ≈ a + c·(L_c−L)^{−1/2}: linear in x = (L_c−L)^{−1/2},
 * so an ordinary two-parameter fit with an R² score is all that's
 * needed. This is a display-side fit; the physics stays in the run data.
 */

export interface LineFit {
  intercept: number;
  slope: number;
  r2: number;
}

export function fitLine(xs: number[], ys: number[]): LineFit {
  const n = xs.length;
  if (n !== ys.length) throw new Error("fitLine: x/y length mismatch");
  if (n < 2) throw new Error(`fitLine: need at least 2 points, got ${n}`);
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) ** 2;
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) ** 2;
  }
  if (sxx === 0) throw new Error("fitLine: x values are all identical");
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  // residual sum of squares against total
  let rss = 0;
  for (let i = 0; i < n; i++) {
    rss += (ys[i] - intercept - slope * xs[i]) ** 2;
  }
  const r2 = syy === 0 ? 1 : 1 - rss / syy;
  return { intercept, slope, r2 };
}
