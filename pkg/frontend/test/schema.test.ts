import { describe, expect, it } from "vitest";
import { mkdtempSync, writeFileSync, copyFileSync } from "fs";
import { tmpdir } from "os";
import path from "path";
import { fileURLToPath } from "url";
import {
  InputError,
  loadGbz,
  loadGbzMeta,
  loadMeta,
  loadPspectra,
  loadRecords,
  loadSpectra,
  loadSweep,
} from "../src/schema.js";

const FIX = fileURLToPath(new URL("./fixtures", import.meta.url));
const fix = (name: string) => path.join(FIX, name);

// --- meta.json ---

it("loads meta and checks the schema version", () => {
  const meta = loadMeta(fix("dip"));
  expect(meta.schema_version).toBe(1);
  expect(meta.command).toBe("dip-scan");
  expect(meta.L_star).toBe(41);
  expect(meta.L_c_pred).toBeCloseTo(42.790847413476264, 10);
});

it("rejects a run written under a different schema version", () => {
  expect(() => loadMeta(fix("badversion"))).toThrow(InputError);
  expect(() => loadMeta(fix("badversion"))).toThrow(/schema_version 2 is not supported/);
  expect(() => loadMeta(fix("badversion"))).toThrow(/meta\.json/);
});

it("points at the missing file for an empty or wrong directory", () => {
  expect(() => loadMeta(fix("nosuch"))).toThrow(/meta\.json.*not found/);
  const empty = mkdtempSync(path.join(tmpdir(), "siecfig-"));
  expect(() => loadMeta(empty)).toThrow(/completed run directory/);
});

// --- records.csv ---

it("loads scan records with numbers parsed and empty cells as null", () => {
  const meta = loadMeta(fix("dip"));
  const rows = loadRecords(fix("dip"));
  expect(rows).toHaveLength(17);
  expect(rows.map((r) => r.L)).toEqual(Array.from({ length: 17 }, (_, i) => 33 + i));
  const dipRow = rows.find((r) => r.L === 41)!;
  expect(dipRow.S).toBeCloseTo(-0.26019564298422637, 12);
  expect(dipRow.cut).toBe("1:20");
  for (const r of rows) {
    expect(r.error).toBe("");
    expect(r.tag).toBe(meta.tag);
  }
});

it("names the offending column and row when a cell cannot be parsed", () => {
  expect(() => loadRecords(fix("badcolumn"))).toThrow(/records\.csv: row 4, column "S"/);
  expect(() => loadRecords(fix("badcolumn"))).toThrow(/"not-a-number"/);
});

it("names a missing column in the header", () => {
  const dir = mkdtempSync(path.join(tmpdir(), "siecfig-"));
  copyFileSync(path.join(fix("dip"), "meta.json"), path.join(dir, "meta.json"));
  writeFileSync(path.join(dir, "records.csv"), "model,delta\nnh_ssh,0.0016\n");
  expect(() => loadRecords(dir)).toThrow(/missing column "t_L"/);
});

it("rejects an unexpected extra column", () => {
  const dir = mkdtempSync(path.join(tmpdir(), "siecfig-"));
  const header =
    "model,t_L,t_R,delta,L,cut,source,S,S2,gap,min_r,L_c_pred,im_residual,fermi_rule,error,timestamp,tag,bonus";
  writeFileSync(path.join(dir, "records.csv"), header + "\n");
  expect(() => loadRecords(dir)).toThrow(/unexpected column "bonus"/);
});

// --- gbz.csv + gbz_meta.json ---

it("loads GBZ points consistent with their sidecar", () => {
  const rows = loadGbz(fix("gbz40"));
  const side = loadGbzMeta(fix("gbz40"));
  expect(rows).toHaveLength(40);
  expect(rows.map((r) => r.m)).toEqual(Array.from({ length: 40 }, (_, i) => i + 1));
  for (const r of rows) {
    expect(r.abs_z).toBeCloseTo(side.radius, 12);
    expect(r.k).toBeGreaterThan(0);
    expect(r.k).toBeLessThan(2 * Math.PI);
  }
  expect(side.L_c).toBeCloseTo(42.790847413476264, 10);
  expect(side.K_c[0]).toBeCloseTo(Math.PI, 12);
  expect(side.K_c[1]).toBeCloseTo(0.1176784432060454, 12);
});

it("reads loop radii that grow with L toward the critical size", () => {
  const radii = [20, 30, 40, 50, 60].map((L) => loadGbzMeta(fix(`gbz${L}`)).radius);
  for (let i = 1; i < radii.length; i++) {
    expect(radii[i]).toBeGreaterThan(radii[i - 1]);
  }
});

// --- sweep.csv ---

it("loads the sweep grid", () => {
  const cells = loadSweep(fix("sweep"));
  expect(cells).toHaveLength(20);
  expect(new Set(cells.map((c) => c.t_ratio)).size).toBe(5);
  expect(new Set(cells.map((c) => c.delta)).size).toBe(4);
  const deep = cells.reduce((a, b) => ((a.S_min ?? 1e9) < (b.S_min ?? 1e9) ? a : b));
  expect(deep.S_min).toBeLessThan(0);
  expect(deep.L_star).toBe(45);
});

// --- spectra / pspectra emissions ---

it("collects spectra files ascending in L", () => {
  const files = loadSpectra(fix("pspec"));
  expect(files.map((f) => f.L)).toEqual([37, 39, 41, 43, 45, 47]);
  for (const f of files) {
    expect(f.values).toHaveLength(4 * f.L);
  }
});

it("collects entanglement spectra with the runaway eigenvalue below the transition", () => {
  const files = loadPspectra(fix("pspec"));
  expect(files.map((f) => f.values.length)).toEqual([76, 80, 84, 88, 92, 96]);
  const minRe = new Map(files.map((f) => [f.L, Math.min(...f.values.map((p) => p[0]))]));
  expect(minRe.get(41)!).toBeCloseTo(-0.1664648285950742, 9);
  // approaching L_c from below the excursion deepens; past it the spectrum pins to [0, 1]
  expect(minRe.get(39)!).toBeLessThan(minRe.get(37)!);
  expect(minRe.get(41)!).toBeLessThan(minRe.get(39)!);
  expect(Math.abs(minRe.get(45)!)).toBeLessThan(1e-8);
});
