import { mkdtempSync, readFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { SchemaError, loadCurves, parseCurvesCsv } from "../src/csv";
import { FIGURE_KINDS, FigureKind, buildFigure, renderFigure } from "../src/figures";
import { renderSvg } from "../src/svg";

const DATA = join(__dirname, "..", "testdata");

const INPUTS: Record<FigureKind, string[]> = {
  psi_cdf_vs_L: [join(DATA, "analytic_curves.csv"), renameSimFile()],
  weighted_cdf_sweep: [join(DATA, "analytic_curves.csv")],
  gdop_vs_psi_bins: [join(DATA, "sim_curves.csv")],
  hull_split: [join(DATA, "hull_curves.csv")],
};

function renameSimFile(): string {
  return join(DATA, "sim_curves.csv");
}

describe("curve csv parsing", () => {
  it("parses golden analytic curves", () => {
    const curves = loadCurves([join(DATA, "analytic_curves.csv")]);
    expect(curves.has("stevens_L4")).toBe(true);
    const c = curves.get("stevens_L4")!;
    expect(c.x.length).toBeGreaterThan(10);
    expect(Math.max(...c.F)).toBeLessThanOrEqual(1.0);
  });

  it("rejects a wrong schema version", () => {
    expect(() => loadCurves([join(DATA, "bad_version.csv")])).toThrow(SchemaError);
    expect(() => loadCurves([join(DATA, "bad_version.csv")])).toThrow(/angsep-csv v1/);
  });

  it("rejects an empty curve file", () => {
    expect(() => loadCurves([join(DATA, "empty.csv")])).toThrow(/no curve rows/);
  });

  it("rejects non-monotone curves", () => {
    const text = "# angsep-csv v1 curves\ncurve_id,x,F\na,1.0,0.5\na,2.0,0.4\n";
    expect(() => parseCurvesCsv(text, "inline")).toThrow(/F decreases/);
  });

  it("rejects duplicated ids across files", () => {
    const p = join(DATA, "analytic_curves.csv");
    expect(() => loadCurves([p, p])).toThrow(/more than one input/);
  });
});

describe("figure rendering", () => {
  const outDir = mkdtempSync(join(tmpdir(), "angsep-figs-"));

  for (const kind of FIGURE_KINDS) {
    it(`renders ${kind} from golden CSVs`, () => {
      const out = join(outDir, `${kind}.svg`);
      renderFigure(kind, INPUTS[kind], out);
      const svg = readFileSync(out, "utf8");
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
      expect(svg.length).toBeGreaterThan(2000);
    });

    it(`${kind} is byte-stable across re-renders`, () => {
      const a = join(outDir, `${kind}-a.svg`);
      const b = join(outDir, `${kind}-b.svg`);
      renderFigure(kind, INPUTS[kind], a);
      renderFigure(kind, INPUTS[kind], b);
      expect(readFileSync(a, "utf8")).toEqual(readFileSync(b, "utf8"));
    });
  }

  it("overlays analytic lines with simulated markers for the per-count figure", () => {
    const spec = buildFigure("psi_cdf_vs_L", loadCurves(INPUTS.psi_cdf_vs_L));
    const kinds = new Set(spec.series.map((s) => s.kind));
    expect(kinds.has("line")).toBe(true);
    expect(kinds.has("markers")).toBe(true);
    const svg = renderSvg(spec);
    expect(svg).toContain("<circle");
    expect(svg).toContain("<polyline");
    expect(svg).toContain("π"); // radian ticks in pi multiples
  });

  it("draws the GDOP = 4 reference in the hull figure", () => {
    const spec = buildFigure("hull_split", loadCurves(INPUTS.hull_split));
    expect(spec.vlines?.[0]?.x).toBe(4);
    const svg = renderSvg(spec);
    expect(svg).toContain("GDOP = 4");
  });

  it("fails loudly when a kind finds no matching curves", () => {
    const curves = loadCurves([join(DATA, "analytic_curves.csv")]);
    expect(() => buildFigure("hull_split", curves)).toThrow(/no hull_/);
  });
});
