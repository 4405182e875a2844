/**
 * The five figure kinds rendered from siec run directories.
 *
 * Every plotted number comes from a field of records.csv / meta.json /
 * gbz.csv / gbz_meta.json / sweep.csv / (p)spectra_L{n}.json. The only
 * computation done here is axis transforms (e.g. mapping the critical
 * momentum into the z-plane the loops are drawn in) and the explicitly
 * labeled least-squares guide on the dip curve.
 */

import {
  GbzRow,
  InputError,
  Meta,
  RecordRow,
  SpectrumFile,
  loadGbz,
  loadGbzMeta,
  loadMeta,
  loadPspectra,
  loadRecords,
  loadSpectra,
  loadSweep,
} from "./schema.js";
import { LegendEntry, PALETTE, Panel, esc, fmtTick, legend, svgClose, svgOpen } from "./svg.js";
import { fitLine } from "./fit.js";

export const FIGURE_KINDS = [
  "spectrum_panels",
  "gbz_loops",
  "dip_curve",
  "smin_heatmap",
  "pspectrum_vs_L",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

function pad(min: number, max: number, frac = 0.08): [number, number] {
  const span = max - min || 1;
  return [min - frac * span, max + frac * span];
}

function describeConfig(meta: Meta): string {
  const c = meta.config as Record<string, unknown>;
  const parts: string[] = [];
  if (typeof c.model === "string") parts.push(c.model);
  if (typeof c.delta === "number") parts.push(`delta=${fmtTick(c.delta)}`);
  return parts.join("  ");
}

// ---------------------------------------------------------------------------
// dip_curve — S vs L with the fitted (L_c−L)^{-1/2} guide
// ---------------------------------------------------------------------------

export function dipCurve(dirs: string[]): string {
  const rows: RecordRow[] = [];
  const metas: Meta[] = [];
  for (const dir of dirs) {
    metas.push(loadMeta(dir));
    rows.push(...loadRecords(dir));
  }
  const good = rows.filter((r) => r.S !== null).sort((a, b) => a.L - b.L);
  const failed = rows.length - good.length;
  if (good.length === 0) {
    throw new InputError("dip_curve: no rows with an entropy value in the given runs");
  }

  // L_c comes from the run metadata; per-row prediction is the fallback
  const Lc =
    metas.map((m) => m.L_c_pred).find((v) => v != null) ??
    good.map((r) => r.L_c_pred).find((v) => v !== null) ??
    null;

  const Ls = good.map((r) => r.L);
  const Ss = good.map((r) => r.S!);
  let yMin = Math.min(...Ss);
  let yMax = Math.max(...Ss);

  // guide fit: S on (L_c−L)^{-1/2}, odd sizes below L_c (the dip branch)
  let guide: { xs: number[]; ys: number[]; label: string } | null = null;
  if (Lc !== null) {
    const branch = good.filter((r) => r.L % 2 === 1 && r.L < Lc);
    if (branch.length >= 3) {
      const f = fitLine(
        branch.map((r) => 1 / Math.sqrt(Lc - r.L)),
        branch.map((r) => r.S!)
      );
      const L0 = Math.min(...branch.map((r) => r.L));
      const L1 = Math.min(Math.max(...branch.map((r) => r.L)) + 0.5, Lc - 0.25);
      const xs: number[] = [];
      const ys: number[] = [];
      for (let i = 0; i <= 120; i++) {
        const L = L0 + ((L1 - L0) * i) / 120;
        xs.push(L);
        ys.push(f.intercept + f.slope / Math.sqrt(Lc - L));
      }
      yMin = Math.min(yMin, ...ys);
      guide = {
        xs,
        ys,
        label: `guide a + c·(L_c−L)^-1/2: c=${f.slope.toFixed(3)}, R²=${f.r2.toFixed(3)}`,
      };
    }
  }

  const [py0, py1] = pad(Math.min(yMin, 0), Math.max(yMax, 0));
  const [px0, px1] = pad(Math.min(...Ls), Math.max(Lc ?? -Infinity, ...Ls), 0.05);
  const p = new Panel({
    x0: 52, y0: 34, width: 400, height: 210,
    xMin: px0, xMax: px1, yMin: py0, yMax: py1,
    xLabel: "L (unit cells)", yLabel: "entanglement entropy S",
  });

  p.body += p.hline(0, `stroke="#bbb" stroke-width="0.5" stroke-dasharray="2,2"`);
  if (Lc !== null) {
    p.body += p.vline(Lc, `stroke="#2d6a4f" stroke-width="0.8" stroke-dasharray="5,3"`);
    p.body += p.text(p.x(Lc) + 3, p.o.y0 + 10, `L_c = ${Lc.toFixed(2)}`, `font-size="6.5" fill="#2d6a4f"`);
  }
  if (guide) {
    p.body += p.polyline(guide.xs, guide.ys, `stroke="#e63946" stroke-width="1" stroke-dasharray="4,2"`);
  }
  p.body += p.polyline(Ls, Ss, `stroke="#4361ee" stroke-width="1.1"`);
  for (let i = 0; i < Ls.length; i++) {
    p.body += p.dot(Ls[i], Ss[i], 1.8, `fill="#4361ee"`);
  }
  const star = metas.map((m) => m.L_star).find((v) => v != null);
  if (star != null) {
    const hit = good.find((r) => r.L === star);
    if (hit) {
      p.body += p.dot(hit.L, hit.S!, 3.2, `fill="none" stroke="#e63946" stroke-width="1"`);
      p.body += p.text(p.x(hit.L) + 4, p.y(hit.S!) + 2.5, `L* = ${star}`, `font-size="6.5" fill="#e63946"`);
    }
  }

  const entries: LegendEntry[] = [{ label: "S from records.csv", color: "#4361ee" }];
  if (guide) entries.push({ label: guide.label, color: "#e63946", dash: "4,2" });
  p.body += legend(p, entries);

  let subtitle = `${describeConfig(metas[0])}  ·  ${good.length} sizes`;
  if (failed > 0) subtitle += `  ·  ${failed} failed row(s) skipped`;
  if (Lc === null) subtitle += `  ·  no L_c in metadata, guide omitted`;
  else if (!guide) subtitle += `  ·  <3 odd sizes below L_c, guide omitted`;
  return p.single("Entanglement dip vs chain length", subtitle, 500, 290);
}

// ---------------------------------------------------------------------------
// gbz_loops — |z|<1 loops in the complex plane, critical point marked
// ---------------------------------------------------------------------------

export function gbzLoops(dirs: string[]): string {
  const loops: { L: number; rows: GbzRow[]; kc: [number, number] }[] = [];
  let sub = "";
  for (const dir of dirs) {
    const meta = loadMeta(dir);
    if (!sub) sub = describeConfig(meta);
    const side = loadGbzMeta(dir);
    loops.push({ L: side.L, rows: loadGbz(dir), kc: side.K_c });
  }
  loops.sort((a, b) => a.L - b.L);

  let rMax = 1.0;
  for (const lp of loops) {
    for (const r of lp.rows) rMax = Math.max(rMax, Math.abs(r.re_z), Math.abs(r.im_z));
  }
  const [lo, hi] = pad(-rMax, rMax, 0.06);

  const p = new Panel({
    x0: 60, y0: 34, width: 260, height: 260,
    xMin: lo, xMax: hi, yMin: lo, yMax: hi,
    xLabel: "Re z", yLabel: "Im z",
  });

  // unit circle for reference
  const th = Array.from({ length: 181 }, (_, i) => (2 * Math.PI * i) / 180);
  p.body += p.polyline(th.map(Math.cos), th.map(Math.sin), `stroke="#ccc" stroke-width="0.6" stroke-dasharray="3,3"`);
  p.body += p.hline(0, `stroke="#ddd" stroke-width="0.4"`);
  p.body += p.vline(0, `stroke="#ddd" stroke-width="0.4"`);

  const entries: LegendEntry[] = [];
  loops.forEach((lp, i) => {
    const color = PALETTE[i % PALETTE.length];
    p.body += p.polygon(lp.rows.map((r) => r.re_z), lp.rows.map((r) => r.im_z), `stroke="${color}" stroke-width="1"`);
    entries.push({ label: `L = ${lp.L}`, color });
  });

  // the critical momentum, mapped through the same z = e^{iK} the loops live in
  const seen = new Set<string>();
  for (const lp of loops) {
    const key = `${lp.kc[0]},${lp.kc[1]}`;
    if (seen.has(key)) continue;
    seen.add(key);
    const zRe = Math.exp(-lp.kc[1]) * Math.cos(lp.kc[0]);
    const zIm = Math.exp(-lp.kc[1]) * Math.sin(lp.kc[0]);
    p.body += p.cross(zRe, zIm, 3.5, `stroke="#111" stroke-width="1.2"`);
    p.body += p.text(p.x(zRe) + 5, p.y(zIm) - 3, "z(K_c)", `font-size="6.5" fill="#111"`);
  }

  p.body += legend(p, [...entries, { label: "unit circle", color: "#ccc", dash: "3,3" }]);
  return p.single("Size-dependent GBZ loops", sub, 380, 330);
}

// ---------------------------------------------------------------------------
// smin_heatmap — dip depth over the (t_L/t_R, delta) plane
// ---------------------------------------------------------------------------

function lerpColor(a: string, b: string, t: number): string {
  const pa = [1, 3, 5].map((i) => parseInt(a.slice(i, i + 2), 16));
  const pb = [1, 3, 5].map((i) => parseInt(b.slice(i, i + 2), 16));
  const mix = pa.map((v, i) => Math.round(v + (pb[i] - v) * t));
  return `#${mix.map((v) => v.toString(16).padStart(2, "0")).join("")}`;
}

/** Two-stop sequential scale: shallow → white-ish, deep dip → dark blue. */
export function heatColor(t: number): string {
  return lerpColor("#f4f7fb", "#08306b", Math.min(1, Math.max(0, t)));
}

export function sminHeatmap(dirs: string[]): string {
  if (dirs.length !== 1) {
    throw new InputError(`smin_heatmap takes exactly one sweep run directory, got ${dirs.length}`);
  }
  const meta = loadMeta(dirs[0]);
  const cells = loadSweep(dirs[0]);
  if (cells.length === 0) {
    throw new InputError("smin_heatmap: sweep.csv has no rows");
  }
  const ratios = [...new Set(cells.map((c) => c.t_ratio))].sort((a, b) => a - b);
  const deltas = [...new Set(cells.map((c) => c.delta))].sort((a, b) => a - b);

  const vals = cells.filter((c) => c.S_min !== null).map((c) => c.S_min!);
  if (vals.length === 0) {
    throw new InputError("smin_heatmap: every sweep cell failed; nothing to color");
  }
  const vMin = Math.min(...vals);
  const vMax = Math.max(...vals);
  const depth = (v: number) => (vMax - v) / (vMax - vMin || 1); // deeper dip → closer to 1

  const x0 = 80;
  const y0 = 40;
  const cw = Math.min(56, Math.max(22, Math.floor(360 / ratios.length)));
  const ch = Math.min(40, Math.max(16, Math.floor(260 / deltas.length)));
  const W = x0 + cw * ratios.length + 90;
  const H = y0 + ch * deltas.length + 60;

  let s = svgOpen(W, H);
  s += `<text x="${x0}" y="14" font-size="10" font-weight="600" fill="#222">Dip depth S_min over the coupling plane</text>\n`;
  s += `<text x="${x0}" y="24" font-size="7" fill="#888">${esc(
    `${describeConfig(meta)}  ·  ${ratios.length}×${deltas.length} grid  ·  cell label: L*`
  )}</text>\n`;

  for (const c of cells) {
    const i = ratios.indexOf(c.t_ratio);
    const j = deltas.indexOf(c.delta);
    const cx = x0 + i * cw;
    const cy = y0 + (deltas.length - 1 - j) * ch; // delta grows upward
    if (c.S_min === null) {
      s += `<rect x="${cx}" y="${cy}" width="${cw}" height="${ch}" fill="#ddd" stroke="#fff" stroke-width="1"/>\n`;
      s += `<text x="${cx + cw / 2}" y="${cy + ch / 2 + 2}" text-anchor="middle" font-size="6" fill="#888">×</text>\n`;
    } else {
      const t = depth(c.S_min);
      s += `<rect x="${cx}" y="${cy}" width="${cw}" height="${ch}" fill="${heatColor(t)}" stroke="#fff" stroke-width="1"/>\n`;
      if (c.L_star !== null) {
        const dark = t > 0.55;
        s += `<text x="${cx + cw / 2}" y="${cy + ch / 2 + 2}" text-anchor="middle" font-size="5.5" fill="${dark ? "#dce6f2" : "#456"}">${c.L_star}</text>\n`;
      }
    }
  }

  // axes: category ticks at cell centers
  const gh = ch * deltas.length;
  const gw = cw * ratios.length;
  s += `<rect x="${x0}" y="${y0}" width="${gw}" height="${gh}" fill="none" stroke="#333" stroke-width="0.7"/>\n`;
  ratios.forEach((r, i) => {
    const x = x0 + i * cw + cw / 2;
    s += `<text x="${x}" y="${y0 + gh + 11}" text-anchor="middle" font-size="6" fill="#555">${esc(fmtTick(r))}</text>\n`;
  });
  deltas.forEach((d, j) => {
    const y = y0 + (deltas.length - 1 - j) * ch + ch / 2 + 2;
    s += `<text x="${x0 - 5}" y="${y}" text-anchor="end" font-size="6" fill="#555">${esc(fmtTick(d))}</text>\n`;
  });
  s += `<text x="${x0 + gw / 2}" y="${y0 + gh + 28}" text-anchor="middle" font-size="8" fill="#444">t_L / t_R</text>\n`;
  s += `<text x="16" y="${y0 + gh / 2}" text-anchor="middle" font-size="8" fill="#444" transform="rotate(-90,16,${y0 + gh / 2})">coupling δ</text>\n`;

  // colorbar
  const bx = x0 + gw + 18;
  const steps = 24;
  for (let i = 0; i < steps; i++) {
    const t = i / (steps - 1);
    const y = y0 + gh - ((i + 1) * gh) / steps;
    s += `<rect x="${bx}" y="${y.toFixed(1)}" width="10" height="${(gh / steps + 0.5).toFixed(1)}" fill="${heatColor(t)}"/>\n`;
  }
  s += `<rect x="${bx}" y="${y0}" width="10" height="${gh}" fill="none" stroke="#333" stroke-width="0.5"/>\n`;
  s += `<text x="${bx + 14}" y="${y0 + 5}" font-size="6" fill="#555">${esc(fmtTick(vMin))}</text>\n`;
  s += `<text x="${bx + 14}" y="${y0 + gh}" font-size="6" fill="#555">${esc(fmtTick(vMax))}</text>\n`;
  s += `<text x="${bx + 5}" y="${y0 - 6}" text-anchor="middle" font-size="6.5" fill="#444">S_min</text>\n`;

  s += svgClose();
  return s;
}

// ---------------------------------------------------------------------------
// spectrum_panels / pspectrum_vs_L — the per-size JSON emissions
// ---------------------------------------------------------------------------

function gatherSpectra(
  dirs: string[],
  load: (dir: string) => SpectrumFile[],
  what: string
): { files: SpectrumFile[]; sub: string } {
  const byL = new Map<number, SpectrumFile>();
  let sub = "";
  for (const dir of dirs) {
    const meta = loadMeta(dir);
    if (!sub) sub = describeConfig(meta);
    for (const f of load(dir)) {
      if (!byL.has(f.L)) byL.set(f.L, f);
    }
  }
  const files = [...byL.values()].sort((a, b) => a.L - b.L);
  if (files.length === 0) {
    throw new InputError(`no ${what}_L*.json found in the given runs; re-run siec with --emit-spectra`);
  }
  return { files, sub };
}

export function spectrumPanels(dirs: string[]): string {
  const { files, sub } = gatherSpectra(dirs, loadSpectra, "spectra");

  let reMax = 0;
  let imMax = 0;
  for (const f of files) {
    for (const [re, im] of f.values) {
      reMax = Math.max(reMax, Math.abs(re));
      imMax = Math.max(imMax, Math.abs(im));
    }
  }
  const [rx0, rx1] = pad(-reMax, reMax, 0.06);
  const [ix0, ix1] = pad(-imMax, imMax, 0.06);

  const cols = Math.min(3, files.length);
  const rowsN = Math.ceil(files.length / cols);
  const pw = 150;
  const ph = 150;
  const gapX = 58;
  const gapY = 46;
  const W = 40 + cols * (pw + gapX);
  const H = 46 + rowsN * (ph + gapY);

  let s = svgOpen(W, H);
  s += `<text x="40" y="14" font-size="10" font-weight="600" fill="#222">Complex spectra vs chain length</text>\n`;
  s += `<text x="40" y="24" font-size="7" fill="#888">${esc(`${sub}  ·  ${files.length} sizes`)}</text>\n`;

  files.forEach((f, idx) => {
    const ci = idx % cols;
    const ri = Math.floor(idx / cols);
    const p = new Panel({
      x0: 40 + ci * (pw + gapX),
      y0: 46 + ri * (ph + gapY),
      width: pw, height: ph,
      xMin: rx0, xMax: rx1, yMin: ix0, yMax: ix1,
      title: `L = ${f.L}  (${f.values.length} states)`,
      xLabel: ri === rowsN - 1 ? "Re E" : undefined,
      yLabel: ci === 0 ? "Im E" : undefined,
    });
    p.body += p.hline(0, `stroke="#ddd" stroke-width="0.4"`);
    p.body += p.vline(0, `stroke="#ddd" stroke-width="0.4"`);
    for (const [re, im] of f.values) {
      p.body += p.dot(re, im, 1.1, `fill="#4361ee" fill-opacity="0.75"`);
    }
    s += p.panel();
  });

  s += svgClose();
  return s;
}

export function pspectrumVsL(dirs: string[]): string {
  const { files, sub } = gatherSpectra(dirs, loadPspectra, "pspectra");

  let yMin = 0;
  let yMax = 1;
  let total = 0;
  for (const f of files) {
    for (const [re] of f.values) {
      yMin = Math.min(yMin, re);
      yMax = Math.max(yMax, re);
    }
    total += f.values.length;
  }
  const Ls = files.map((f) => f.L);
  const [px0, px1] = pad(Math.min(...Ls), Math.max(...Ls), 0.05);
  const [py0, py1] = pad(yMin, yMax);

  const p = new Panel({
    x0: 52, y0: 34, width: 400, height: 220,
    xMin: px0, xMax: px1, yMin: py0, yMax: py1,
    xLabel: "L (unit cells)", yLabel: "Re p (occupation spectrum)",
  });
  p.body += p.hline(0, `stroke="#bbb" stroke-width="0.5" stroke-dasharray="2,2"`);
  p.body += p.hline(1, `stroke="#bbb" stroke-width="0.5" stroke-dasharray="2,2"`);
  for (const f of files) {
    for (const [re] of f.values) {
      p.body += p.dot(f.L, re, 1.2, `fill="#4361ee" fill-opacity="0.55"`);
    }
  }
  const subtitle = `${sub}  ·  ${files.length} sizes, ${total} eigenvalues  ·  dashed: p = 0, 1`;
  return p.single("Truncated-projector spectrum vs chain length", subtitle, 500, 300);
}

// ---------------------------------------------------------------------------

export function renderFigure(kind: FigureKind, dirs: string[]): string {
  if (dirs.length === 0) {
    throw new InputError("at least one run directory is required");
  }
  switch (kind) {
    case "dip_curve":
      return dipCurve(dirs);
    case "gbz_loops":
      return gbzLoops(dirs);
    case "smin_heatmap":
      return sminHeatmap(dirs);
    case "spectrum_panels":
      return spectrumPanels(dirs);
    case "pspectrum_vs_L":
      return pspectrumVsL(dirs);
  }
}
