#!/usr/bin/env node
/** Figure regeneration from the simulator's curve CSVs.
 *
 *   plot --kind psi_cdf_vs_L --in curves.csv --out gap_cdf.svg
 *   plot --kind hull_split --in hull_curves.csv --out hull_split.svg
 */

import { FIGURE_KINDS, FigureKind, renderFigure } from "./figures";

function usage(): never {
  console.error(
    `usage: plot --kind <${FIGURE_KINDS.join("|")}> --in <csv...> --out <path.svg>`
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv[0] !== "plot") usage();
  let kind: string | undefined;
  const inputs: string[] = [];
  let out: string | undefined;
  for (let i = 1; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--kind") {
      kind = argv[++i];
    } else if (a === "--in") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
        inputs.push(argv[++i]);
      }
    } else if (a === "--out") {
      out = argv[++i];
    } else {
      console.error(`unknown argument: ${a}`);
      usage();
    }
  }
  if (!kind || !out || inputs.length === 0) usage();
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    console.error(`unknown figure kind: ${kind}`);
    usage();
  }
  renderFigure(kind as FigureKind, inputs, out);
  console.log(`wrote ${out}`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
