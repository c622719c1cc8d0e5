import { writeFileSync } from "fs";

import { Curve, loadCurves } from "./csv";
import { PALETTE, PlotSpec, Series, renderSvg } from "./svg";

export const FIGURE_KINDS = [
  "gdop_vs_psi_bins",
  "psi_cdf_vs_L",
  "weighted_cdf_sweep",
  "hull_split",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

const MAX_POINTS = 600;

function thin(curve: Curve): { x: number[]; y: number[] } {
  const n = curve.x.length;
  if (n <= MAX_POINTS) return { x: curve.x, y: curve.F };
  const x: number[] = [];
  const y: number[] = [];
  const stride = (n - 1) / (MAX_POINTS - 1);
  for (let i = 0; i < MAX_POINTS; i++) {
    const j = Math.round(i * stride);
    x.push(curve.x[j]);
    y.push(curve.F[j]);
  }
  return { x, y };
}

function series(curve: Curve, label: string, kind: Series["kind"], color: string): Series {
  return { label, kind, color, ...thin(curve) };
}

function sortedById(curves: Map<string, Curve>, prefix: string): Curve[] {
  return [...curves.values()]
    .filter((c) => c.id.startsWith(prefix))
    .sort((a, b) => a.id.localeCompare(b.id, "en", { numeric: true }));
}

export function buildFigure(kind: FigureKind, curves: Map<string, Curve>): PlotSpec {
  switch (kind) {
    case "psi_cdf_vs_L": {
      // analytic families as lines, simulated families as markers (same color per L)
      const out: Series[] = [];
      for (let L = 3; L <= 8; L++) {
        const color = PALETTE[(L - 3) % PALETTE.length];
        const ana = curves.get(`stevens_L${L}`);
        if (ana) out.push(series(ana, `analytic L=${L}`, "line", color));
        const emp = curves.get(`empirical_psi_L${L}`);
        if (emp) out.push(series(emp, `simulated L=${L}`, "markers", color));
      }
      if (out.length === 0) throw new Error("no stevens_L*/empirical_psi_L* curves in input");
      return {
        title: "Largest-gap CDF by number of hearable base stations",
        xLabel: "maximum angular separation (rad)",
        yLabel: "P(gap ≤ x)",
        xScale: "pi",
        series: out,
      };
    }
    case "weighted_cdf_sweep": {
      const found = sortedById(curves, "weighted_");
      if (found.length === 0) throw new Error("no weighted_* curves in input");
      const out = found.map((c, i) =>
        series(c, c.id.replace("weighted_", ""), "line", PALETTE[i % PALETTE.length])
      );
      return {
        title: "Hearability-weighted largest-gap CDF",
        xLabel: "maximum angular separation (rad)",
        yLabel: "P(gap ≤ x | N ≥ 4)",
        xScale: "pi",
        series: out,
        vlines: [{ x: Math.PI, label: "π (hull boundary)" }],
      };
    }
    case "gdop_vs_psi_bins": {
      const found = sortedById(curves, "gdop_tdoa_cdf_psi_bin");
      if (found.length === 0) throw new Error("no gdop_tdoa_cdf_psi_bin* curves in input");
      const out = found.map((c, i) =>
        series(c, `gap bin ${c.id.slice("gdop_tdoa_cdf_psi_bin".length)}`, "line",
          PALETTE[i % PALETTE.length])
      );
      return {
        title: "TDOA GDOP distribution by largest-gap range",
        xLabel: "GDOP",
        yLabel: "P(GDOP ≤ x)",
        xScale: "log",
        series: out,
      };
    }
    case "hull_split": {
      const inside = sortedById(curves, "hull_inside_");
      const outside = sortedById(curves, "hull_outside_");
      if (inside.length + outside.length === 0) {
        throw new Error("no hull_inside_*/hull_outside_* curves in input");
      }
      const out: Series[] = [];
      inside.forEach((c, i) =>
        out.push(series(c, `inside hull ${c.id.slice("hull_inside_".length)}`, "line",
          PALETTE[i % PALETTE.length]))
      );
      outside.forEach((c, i) =>
        out.push(series(c, `outside hull ${c.id.slice("hull_outside_".length)}`, "dashed",
          PALETTE[i % PALETTE.length]))
      );
      return {
        title: "TDOA GDOP inside vs outside the convex hull",
        xLabel: "GDOP",
        yLabel: "P(GDOP ≤ x)",
        xScale: "log",
        series: out,
        vlines: [{ x: 4, label: "GDOP = 4" }],
      };
    }
  }
}

export function renderFigure(kind: FigureKind, inputPaths: string[], outPath: string): void {
  const curves = loadCurves(inputPaths);
  const svg = renderSvg(buildFigure(kind, curves));
  writeFileSync(outPath, svg);
}
