/**
 * Small hand-rolled SVG helpers shared by the figure builders.
 *
 * Everything is plain string assembly: fixed canvas sizes, standard
 * font stack, coordinates rounded to one decimal so reruns are
 * byte-identical.
 */

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Round-number axis ticks covering [min, max] with about `count` steps. */
export function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const nice = [1, 2, 5, 10].map((m) => m * mag);
  const step = nice.find((n) => n >= rough) ?? rough;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) ticks.push(v);
  return ticks;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return parseFloat(v.toPrecision(6)).toString();
}

/** Categorical palette for per-size loops and curves. */
export const PALETTE = [
  "#4361ee", "#e63946", "#2d6a4f", "#f77f00", "#7209b7",
  "#0096c7", "#d62828", "#52796f", "#b5838d", "#5f0f40",
];

export function svgOpen(width: number, height: number): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
    `font-family="Helvetica, Arial, sans-serif">\n<rect width="${width}" height="${height}" fill="#fff"/>\n`
  );
}

export function svgClose(): string {
  return `</svg>\n`;
}

export interface PanelOpts {
  /** Plot-area rectangle inside the enclosing SVG. */
  x0: number;
  y0: number;
  width: number;
  height: number;
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

/**
 * One cartesian panel: linear scales, grid, frame, tick labels.
 * Builders append marks to `body`, then embed `panel()` in an SVG
 * document (or call `Panel.single` for a one-panel figure).
 */
export class Panel {
  readonly o: PanelOpts;
  body = "";

  constructor(o: PanelOpts) {
    this.o = o;
  }

  x(v: number): number {
    const { xMin, xMax, x0, width } = this.o;
    return x0 + ((v - xMin) / (xMax - xMin || 1)) * width;
  }

  y(v: number): number {
    const { yMin, yMax, y0, height } = this.o;
    return y0 + height - ((v - yMin) / (yMax - yMin || 1)) * height;
  }

  polyline(xs: number[], ys: number[], attrs: string): string {
    const pts = xs.map((x, i) => `${this.x(x).toFixed(1)},${this.y(ys[i]).toFixed(1)}`).join(" ");
    return `<polyline fill="none" ${attrs} points="${pts}"/>\n`;
  }

  polygon(xs: number[], ys: number[], attrs: string): string {
    const pts = xs.map((x, i) => `${this.x(x).toFixed(1)},${this.y(ys[i]).toFixed(1)}`).join(" ");
    return `<polygon fill="none" ${attrs} points="${pts}"/>\n`;
  }

  dot(x: number, y: number, r: number, attrs: string): string {
    return `<circle cx="${this.x(x).toFixed(1)}" cy="${this.y(y).toFixed(1)}" r="${r}" ${attrs}/>\n`;
  }

  cross(x: number, y: number, half: number, attrs: string): string {
    const cx = this.x(x);
    const cy = this.y(y);
    return (
      `<line x1="${(cx - half).toFixed(1)}" y1="${(cy - half).toFixed(1)}" x2="${(cx + half).toFixed(1)}" y2="${(cy + half).toFixed(1)}" ${attrs}/>\n` +
      `<line x1="${(cx - half).toFixed(1)}" y1="${(cy + half).toFixed(1)}" x2="${(cx + half).toFixed(1)}" y2="${(cy - half).toFixed(1)}" ${attrs}/>\n`
    );
  }

  hline(yVal: number, attrs: string): string {
    const y = this.y(yVal).toFixed(1);
    return `<line x1="${this.o.x0}" y1="${y}" x2="${this.o.x0 + this.o.width}" y2="${y}" ${attrs}/>\n`;
  }

  vline(xVal: number, attrs: string): string {
    const x = this.x(xVal).toFixed(1);
    return `<line x1="${x}" y1="${this.o.y0}" x2="${x}" y2="${this.o.y0 + this.o.height}" ${attrs}/>\n`;
  }

  text(x: number, y: number, label: string, attrs: string): string {
    return `<text x="${x.toFixed(1)}" y="${y.toFixed(1)}" ${attrs}>${esc(label)}</text>\n`;
  }

  /** Grid, body marks, frame, and tick/axis labels — no SVG wrapper. */
  panel(): string {
    const { x0, y0, width: pw, height: ph } = this.o;
    let s = "";
    if (this.o.title) {
      s += `<text x="${x0}" y="${y0 - 4}" font-size="8" font-weight="600" fill="#333">${esc(this.o.title)}</text>\n`;
    }

    const yTicks = niceTicks(this.o.yMin, this.o.yMax, 5);
    for (const v of yTicks) {
      const y = this.y(v).toFixed(1);
      s += `<line x1="${x0}" y1="${y}" x2="${x0 + pw}" y2="${y}" stroke="#eee" stroke-width="0.5"/>\n`;
      s += `<line x1="${x0 - 3}" y1="${y}" x2="${x0}" y2="${y}" stroke="#333" stroke-width="0.5"/>\n`;
      s += `<text x="${x0 - 5}" y="${(this.y(v) + 2.5).toFixed(1)}" text-anchor="end" font-size="6.5" fill="#555">${esc(fmtTick(v))}</text>\n`;
    }

    s += this.body;

    s += `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y0 + ph}" stroke="#333" stroke-width="0.7"/>\n`;
    s += `<line x1="${x0}" y1="${y0 + ph}" x2="${x0 + pw}" y2="${y0 + ph}" stroke="#333" stroke-width="0.7"/>\n`;

    for (const v of niceTicks(this.o.xMin, this.o.xMax, Math.min(7, Math.round(pw / 40)))) {
      const x = this.x(v).toFixed(1);
      s += `<line x1="${x}" y1="${y0 + ph}" x2="${x}" y2="${y0 + ph + 3}" stroke="#333" stroke-width="0.5"/>\n`;
      s += `<text x="${x}" y="${y0 + ph + 12}" text-anchor="middle" font-size="6.5" fill="#555">${esc(fmtTick(v))}</text>\n`;
    }
    if (this.o.xLabel) {
      s += `<text x="${x0 + pw / 2}" y="${y0 + ph + 24}" text-anchor="middle" font-size="8" fill="#444">${esc(this.o.xLabel)}</text>\n`;
    }
    if (this.o.yLabel) {
      const cy = y0 + ph / 2;
      s += `<text x="${x0 - 32}" y="${cy}" text-anchor="middle" font-size="8" fill="#444" transform="rotate(-90,${x0 - 32},${cy})">${esc(this.o.yLabel)}</text>\n`;
    }
    return s;
  }

  /** Wrap a single panel into a complete document with a figure title. */
  single(title: string, subtitle: string, width: number, height: number): string {
    let s = svgOpen(width, height);
    s += `<text x="${this.o.x0}" y="14" font-size="10" font-weight="600" fill="#222">${esc(title)}</text>\n`;
    if (subtitle) {
      s += `<text x="${this.o.x0}" y="24" font-size="7" fill="#888">${esc(subtitle)}</text>\n`;
    }
    s += this.panel();
    s += svgClose();
    return s;
  }
}

export interface LegendEntry {
  label: string;
  color: string;
  dash?: string;
}

/** Legend box anchored to a panel's top-right corner. */
export function legend(p: Panel, entries: LegendEntry[]): string {
  if (entries.length === 0) return "";
  const w = Math.max(...entries.map((e) => e.label.length)) * 4.2 + 26;
  const h = entries.length * 10 + 6;
  const x0 = p.o.x0 + p.o.width - w - 4;
  const y0 = p.o.y0 + 4;
  let s = `<rect x="${x0.toFixed(1)}" y="${y0}" width="${w.toFixed(1)}" height="${h}" rx="2" fill="white" fill-opacity="0.85" stroke="#ddd" stroke-width="0.4"/>\n`;
  entries.forEach((e, i) => {
    const y = y0 + 9 + i * 10;
    s += `<line x1="${(x0 + 4).toFixed(1)}" y1="${y - 2.5}" x2="${(x0 + 18).toFixed(1)}" y2="${y - 2.5}" stroke="${e.color}" stroke-width="1.2" ${e.dash ? `stroke-dasharray="${e.dash}"` : ""}/>\n`;
    s += `<text x="${(x0 + 22).toFixed(1)}" y="${y}" font-size="6.5" fill="#444">${esc(e.label)}</text>\n`;
  });
  return s;
}
