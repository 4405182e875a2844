/**
 * Readers for siec run directories.
 *
 * Every loader here parses one documented artifact (meta.json, records.csv,
 * gbz.csv, gbz_meta.json, sweep.csv, spectra_L{n}.json, pspectra_L{n}.json)
 * and fails with a message naming the file and the offending column/field.
 * Nothing in this module computes physics — it only reads what the run
 * wrote.
 */

import { readFileSync, readdirSync, existsSync } from "fs";
import path from "path";
import Papa from "papaparse";
import { z } from "zod";

/** Run-directory schema this renderer understands. */
export const SUPPORTED_SCHEMA_VERSION = 1;

/** Bad or incompatible input; the CLI maps this to exit code 2. */
export class InputError extends Error {}

// ---------------------------------------------------------------------------
// meta.json
// ---------------------------------------------------------------------------

const metaSchema = z
  .object({
    schema_version: z.number(),
    command: z.string(),
    tag: z.string(),
    config: z.looseObject({}),
    L_star: z.number().nullish(),
    S_min: z.number().nullish(),
    L_c_pred: z.number().nullish(),
  })
  .loose();

export type Meta = z.infer<typeof metaSchema>;

function readJson(file: string): unknown {
  let text: string;
  try {
    text = readFileSync(file, "utf-8");
  } catch {
    throw new InputError(`${file}: not found (is this a completed run directory?)`);
  }
  try {
    return JSON.parse(text);
  } catch (err) {
    throw new InputError(`${file}: not valid JSON (${(err as Error).message})`);
  }
}

function zodParse<T>(schema: z.ZodType<T>, raw: unknown, file: string): T {
  const res = schema.safeParse(raw);
  if (!res.success) {
    const issue = res.error.issues[0];
    const where = issue.path.length ? `field "${issue.path.join(".")}"` : "top level";
    throw new InputError(`${file}: ${where}: ${issue.message}`);
  }
  return res.data;
}

/** Load and version-check meta.json; every run directory must have one. */
export function loadMeta(dir: string): Meta {
  const file = path.join(dir, "meta.json");
  const meta = zodParse(metaSchema, readJson(file), file);
  if (meta.schema_version !== SUPPORTED_SCHEMA_VERSION) {
    throw new InputError(
      `${file}: schema_version ${meta.schema_version} is not supported ` +
        `(this renderer reads version ${SUPPORTED_SCHEMA_VERSION}); ` +
        `re-run the scan with a matching siec version`
    );
  }
  return meta;
}

// ---------------------------------------------------------------------------
// CSV files
// ---------------------------------------------------------------------------

const RECORD_COLUMNS = [
  "model", "t_L", "t_R", "delta", "L", "cut", "source",
  "S", "S2", "gap", "min_r", "L_c_pred", "im_residual",
  "fermi_rule", "error", "timestamp", "tag",
] as const;

export interface RecordRow {
  model: string;
  t_L: number | null;
  t_R: number | null;
  delta: number;
  L: number;
  cut: string;
  source: string;
  S: number | null;
  S2: number | null;
  gap: number | null;
  min_r: number | null;
  L_c_pred: number | null;
  im_residual: number | null;
  fermi_rule: string;
  error: string;
  timestamp: string;
  tag: string;
}

export interface GbzRow {
  m: number;
  k: number;
  re_z: number;
  im_z: number;
  abs_z: number;
  regime: string;
}

export interface SweepRow {
  t_ratio: number;
  delta: number;
  t_L: number;
  t_R: number;
  L_star: number | null;
  S_min: number | null;
  error: string;
}

function parseCsv(file: string, expected: readonly string[]): Record<string, string>[] {
  let text: string;
  try {
    text = readFileSync(file, "utf-8");
  } catch {
    throw new InputError(`${file}: not found (is this a completed run directory?)`);
  }
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  const got = parsed.meta.fields ?? [];
  for (const col of expected) {
    if (!got.includes(col)) {
      throw new InputError(`${file}: missing column "${col}" (header: ${got.join(",")})`);
    }
  }
  for (const col of got) {
    if (!expected.includes(col)) {
      throw new InputError(`${file}: unexpected column "${col}"`);
    }
  }
  return parsed.data;
}

function num(file: string, row: number, col: string, raw: string): number {
  const v = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(v)) {
    throw new InputError(`${file}: row ${row}, column "${col}": cannot parse "${raw}" as a number`);
  }
  return v;
}

function optNum(file: string, row: number, col: string, raw: string): number | null {
  return raw === "" ? null : num(file, row, col, raw);
}

function int(file: string, row: number, col: string, raw: string): number {
  const v = num(file, row, col, raw);
  if (!Number.isInteger(v)) {
    throw new InputError(`${file}: row ${row}, column "${col}": "${raw}" is not an integer`);
  }
  return v;
}

/** records.csv — one scan point per row; failed points carry `error`. */
export function loadRecords(dir: string): RecordRow[] {
  const file = path.join(dir, "records.csv");
  return parseCsv(file, RECORD_COLUMNS).map((r, i) => {
    const n = i + 2; // header is line 1
    return {
      model: r.model,
      t_L: optNum(file, n, "t_L", r.t_L),
      t_R: optNum(file, n, "t_R", r.t_R),
      delta: num(file, n, "delta", r.delta),
      L: int(file, n, "L", r.L),
      cut: r.cut,
      source: r.source,
      S: optNum(file, n, "S", r.S),
      S2: optNum(file, n, "S2", r.S2),
      gap: optNum(file, n, "gap", r.gap),
      min_r: optNum(file, n, "min_r", r.min_r),
      L_c_pred: optNum(file, n, "L_c_pred", r.L_c_pred),
      im_residual: optNum(file, n, "im_residual", r.im_residual),
      fermi_rule: r.fermi_rule,
      error: r.error,
      timestamp: r.timestamp,
      tag: r.tag,
    };
  });
}

/** gbz.csv — one momentum-grid point per row. */
export function loadGbz(dir: string): GbzRow[] {
  const file = path.join(dir, "gbz.csv");
  return parseCsv(file, ["m", "k", "re_z", "im_z", "abs_z", "regime"]).map((r, i) => {
    const n = i + 2;
    return {
      m: int(file, n, "m", r.m),
      k: num(file, n, "k", r.k),
      re_z: num(file, n, "re_z", r.re_z),
      im_z: num(file, n, "im_z", r.im_z),
      abs_z: num(file, n, "abs_z", r.abs_z),
      regime: r.regime,
    };
  });
}

/** sweep.csv — one (t_L/t_R, delta) grid cell per row. */
export function loadSweep(dir: string): SweepRow[] {
  const file = path.join(dir, "sweep.csv");
  return parseCsv(file, ["t_ratio", "delta", "t_L", "t_R", "L_star", "S_min", "error"]).map(
    (r, i) => {
      const n = i + 2;
      return {
        t_ratio: num(file, n, "t_ratio", r.t_ratio),
        delta: num(file, n, "delta", r.delta),
        t_L: num(file, n, "t_L", r.t_L),
        t_R: num(file, n, "t_R", r.t_R),
        L_star: r.L_star === "" ? null : int(file, n, "L_star", r.L_star),
        S_min: optNum(file, n, "S_min", r.S_min),
        error: r.error,
      };
    }
  );
}

// ---------------------------------------------------------------------------
// gbz_meta.json and the per-size spectra files
// ---------------------------------------------------------------------------

const pairSchema = z.tuple([z.number(), z.number()]);

const gbzMetaSchema = z
  .object({
    L: z.number().int(),
    regime: z.string(),
    alpha: z.number(),
    L_prime: z.number(),
    L_c: z.number(),
    K_c: pairSchema,
    radius: z.number(),
  })
  .loose();

export type GbzMeta = z.infer<typeof gbzMetaSchema>;

export function loadGbzMeta(dir: string): GbzMeta {
  const file = path.join(dir, "gbz_meta.json");
  return zodParse(gbzMetaSchema, readJson(file), file);
}

const spectraSchema = z.object({ L: z.number().int(), energies: z.array(pairSchema) });
const pspectraSchema = z.object({ L: z.number().int(), p: z.array(pairSchema) });

export interface SpectrumFile {
  L: number;
  /** [re, im] pairs, exactly as written. */
  values: [number, number][];
}

function listByPrefix(dir: string, prefix: string): string[] {
  if (!existsSync(dir)) {
    throw new InputError(`${dir}: run directory does not exist`);
  }
  const re = new RegExp(`^${prefix}_L(\\d+)\\.json$`);
  return readdirSync(dir)
    .filter((f) => re.test(f))
    .sort((a, b) => Number(a.match(re)![1]) - Number(b.match(re)![1]));
}

/** All spectra_L{n}.json in a run dir, ascending in L. */
export function loadSpectra(dir: string): SpectrumFile[] {
  return listByPrefix(dir, "spectra").map((f) => {
    const file = path.join(dir, f);
    const data = zodParse(spectraSchema, readJson(file), file);
    return { L: data.L, values: data.energies };
  });
}

/** All pspectra_L{n}.json in a run dir, ascending in L. */
export function loadPspectra(dir: string): SpectrumFile[] {
  return listByPrefix(dir, "pspectra").map((f) => {
    const file = path.join(dir, f);
    const data = zodParse(pspectraSchema, readJson(file), file);
    return { L: data.L, values: data.p };
  });
}
