#!/usr/bin/env node
/**
 * siec-fig — render SVG figures from siec run directories.
 *
 *   siec-fig <kind> --runs DIR [DIR ...] --out FILE.svg
 *
 * Kinds: spectrum_panels | gbz_loops | dip_curve | smin_heatmap | pspectrum_vs_L
 *
 * Exit codes follow the producer CLI: 0 success, 2 bad input (unknown
 * kind, unreadable/mismatched run data), 1 unexpected failure.
 */

import { writeFileSync } from "fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { FIGURE_KINDS, FigureKind, renderFigure } from "./figures.js";
import { InputError } from "./schema.js";

export function run(argv: string[]): number {
  const parser = yargs(argv)
    .scriptName("siec-fig")
    .command("$0 <kind>", "render one figure from completed run directories", (y) =>
      y
        .positional("kind", {
          describe: "figure kind",
          choices: FIGURE_KINDS,
          demandOption: true,
        })
        .option("runs", {
          type: "string",
          array: true,
          demandOption: true,
          describe: "run directories written by the siec CLI",
        })
        .option("out", {
          type: "string",
          demandOption: true,
          describe: "output SVG path",
        })
    )
    .strict()
    .fail((msg, err) => {
      throw err ?? new InputError(msg);
    });

  let args: { kind: FigureKind; runs: string[]; out: string };
  try {
    args = parser.parseSync() as unknown as typeof args;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }

  try {
    const svg = renderFigure(args.kind, args.runs);
    writeFileSync(args.out, svg);
    console.log(`${args.kind}: ${args.runs.length} run(s) -> ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof InputError) {
      console.error(err.message);
      return 2;
    }
    console.error(`figure rendering failed: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

export function main(): never {
  process.exit(run(hideBin(process.argv)));
}
