// Acceptance checks for the figure pipeline: each kind renders from a
// completed run directory without recomputation, and every kind fails
// cleanly on a schema-version mismatch.

import { expect, it } from "vitest";
import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import path from "path";
import { fileURLToPath } from "url";
import {
  dipCurve,
  gbzLoops,
  heatColor,
  pspectrumVsL,
  renderFigure,
  sminHeatmap,
  spectrumPanels,
} from "../src/figures.js";
import { InputError } from "../src/schema.js";

const FIX = fileURLToPath(new URL("./fixtures", import.meta.url));
const fix = (name: string) => path.join(FIX, name);
const GBZ_DIRS = [20, 30, 40, 50, 60].map((L) => fix(`gbz${L}`));

const count = (hay: string, needle: string) => hay.split(needle).length - 1;

// --- dip_curve ---

it("renders the dip curve with the fitted guide and markers", () => {
  const svg = dipCurve([fix("dip")]);
  expect(svg.startsWith(`<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 500 290"`)).toBe(true);
  expect(svg.endsWith("</svg>\n")).toBe(true);
  expect(svg).toContain("L_c = 42.79");
  expect(svg).toContain("L* = 41");
  // the guide label carries the display-side fit, frozen against the fixture
  expect(svg).toContain("guide a + c·(L_c−L)^-1/2: c=-2.878, R²=0.972");
  expect(count(svg, "<circle")).toBeGreaterThanOrEqual(17);
  expect(svg).toContain("17 sizes");
});

it("renders dip curves byte-identically across calls", () => {
  expect(dipCurve([fix("dip")])).toBe(dipCurve([fix("dip")]));
});

it("omits the guide when the run has no critical-size prediction", () => {
  const dir = mkdtempSync(path.join(tmpdir(), "siecfig-"));
  const meta = JSON.parse(readFileSync(path.join(fix("dip"), "meta.json"), "utf-8"));
  meta.L_c_pred = null;
  writeFileSync(path.join(dir, "meta.json"), JSON.stringify(meta));
  const lines = readFileSync(path.join(fix("dip"), "records.csv"), "utf-8").split("\n");
  const iLc = lines[0].split(",").indexOf("L_c_pred");
  const blanked = lines.map((ln, i) => {
    if (i === 0 || ln === "") return ln;
    const cells = ln.split(",");
    cells[iLc] = "";
    return cells.join(",");
  });
  writeFileSync(path.join(dir, "records.csv"), blanked.join("\n"));
  const svg = dipCurve([dir]);
  expect(svg).toContain("no L_c in metadata, guide omitted");
  expect(svg).not.toContain("guide a + c");
});

it("refuses runs where every row failed", () => {
  const dir = mkdtempSync(path.join(tmpdir(), "siecfig-"));
  const src = fix("dip");
  writeFileSync(path.join(dir, "meta.json"), readFileSync(path.join(src, "meta.json")));
  const header = readFileSync(path.join(src, "records.csv"), "utf-8").split("\n")[0];
  writeFileSync(
    path.join(dir, "records.csv"),
    header + "\nnh_ssh,1.6,0.88,0.0016,41,1:20,dense_physical,,,,,,,Re E < 0,boom,,t\n"
  );
  expect(() => dipCurve([dir])).toThrow(/no rows with an entropy value/);
});

// --- gbz_loops ---

it("renders nested GBZ loops with the critical point marked", () => {
  const svg = gbzLoops(GBZ_DIRS);
  expect(svg).toContain(`viewBox="0 0 380 330"`);
  expect(count(svg, "<polygon")).toBe(5);
  for (const L of [20, 30, 40, 50, 60]) expect(svg).toContain(`L = ${L}`);
  expect(svg).toContain("z(K_c)");
  expect(svg).toContain("unit circle");
  // all five runs share one critical momentum, so exactly one marker (two cross strokes)
  expect(count(svg, "z(K_c)")).toBe(1);
});

it("renders GBZ loops byte-identically across calls", () => {
  expect(gbzLoops(GBZ_DIRS)).toBe(gbzLoops(GBZ_DIRS));
});

// --- smin_heatmap ---

it("renders the sweep heatmap with one rect per cell and a colorbar", () => {
  const svg = sminHeatmap([fix("sweep")]);
  expect(svg).toContain("Dip depth S_min");
  expect(svg).toContain("t_L / t_R");
  expect(svg).toContain("coupling δ");
  expect(svg).toContain("S_min</text>");
  // 20 grid cells + 24 colorbar steps + grid frame + colorbar frame + background
  expect(count(svg, "<rect")).toBe(20 + 24 + 3);
  expect(svg).toContain("5×4 grid");
});

it("maps deeper dips to darker cells", () => {
  expect(heatColor(0)).toBe("#f4f7fb");
  expect(heatColor(1)).toBe("#08306b");
  expect(heatColor(2)).toBe("#08306b"); // clamped
});

it("insists on exactly one sweep directory", () => {
  expect(() => sminHeatmap([fix("sweep"), fix("sweep")])).toThrow(/exactly one/);
});

// --- spectrum_panels / pspectrum_vs_L ---

it("renders one spectrum panel per emitted size", () => {
  const svg = spectrumPanels([fix("pspec")]);
  for (const L of [37, 39, 41, 43, 45, 47]) {
    expect(svg).toContain(`L = ${L}  (${4 * L} states)`);
  }
  const totalStates = [37, 39, 41, 43, 45, 47].reduce((a, L) => a + 4 * L, 0);
  expect(count(svg, "<circle")).toBe(totalStates);
  expect(svg).toContain("6 sizes");
});

it("renders the occupation spectrum vs L scatter", () => {
  const svg = pspectrumVsL([fix("pspec")]);
  expect(svg).toContain("Truncated-projector spectrum");
  expect(svg).toContain("6 sizes, 516 eigenvalues");
  expect(count(svg, "<circle")).toBe(516);
});

it("asks for --emit-spectra when a run has no spectra files", () => {
  expect(() => spectrumPanels([fix("dip")])).toThrow(/--emit-spectra/);
  expect(() => pspectrumVsL([fix("dip")])).toThrow(/--emit-spectra/);
});

// --- cross-cutting: schema-version gate and dispatch ---

it("every kind fails cleanly on a schema-version mismatch", () => {
  for (const kind of ["dip_curve", "gbz_loops", "smin_heatmap", "spectrum_panels", "pspectrum_vs_L"] as const) {
    expect(() => renderFigure(kind, [fix("badversion")])).toThrow(/schema_version 2 is not supported/);
  }
});

it("requires at least one run directory", () => {
  expect(() => renderFigure("dip_curve", [])).toThrow(InputError);
});
