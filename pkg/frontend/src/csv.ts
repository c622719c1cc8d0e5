import { readFileSync } from "fs";

export const SCHEMA_VERSION = "angsep-csv v1";

export interface Curve {
  id: string;
  x: number[];
  F: number[];
}

export class SchemaError extends Error {}

/** Parse one curves.csv file (curve_id,x,F) into ordered per-id curves. */
export function parseCurvesCsv(text: string, source: string): Map<string, Curve> {
  const lines = text.split(/\r?\n/);
  const versionLine = lines[0] ?? "";
  if (!versionLine.startsWith(`# ${SCHEMA_VERSION}`)) {
    throw new SchemaError(
      `${source}: expected schema "${SCHEMA_VERSION}", got "${versionLine.trim()}"`
    );
  }
  if ((lines[1] ?? "").trim() !== "curve_id,x,F") {
    throw new SchemaError(`${source}: unexpected header "${lines[1]}"`);
  }
  const curves = new Map<string, Curve>();
  for (let i = 2; i < lines.length; i++) {
    const line = lines[i];
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== 3) {
      throw new SchemaError(`${source}:${i + 1}: expected 3 columns, got ${parts.length}`);
    }
    const [id, xs, fs] = parts;
    const x = Number(xs);
    const F = Number(fs);
    if (!Number.isFinite(x) || !Number.isFinite(F)) {
      throw new SchemaError(`${source}:${i + 1}: non-finite value in "${line}"`);
    }
    let curve = curves.get(id);
    if (curve === undefined) {
      curve = { id, x: [], F: [] };
      curves.set(id, curve);
    }
    curve.x.push(x);
    curve.F.push(F);
  }
  if (curves.size === 0) {
    throw new SchemaError(`${source}: no curve rows`);
  }
  for (const curve of curves.values()) {
    validateCurve(curve, source);
  }
  return curves;
}

function validateCurve(curve: Curve, source: string) {
  for (let i = 1; i < curve.x.length; i++) {
    if (!(curve.x[i] > curve.x[i - 1])) {
      throw new SchemaError(`${source}: curve ${curve.id}: x not strictly increasing at row ${i}`);
    }
    if (curve.F[i] < curve.F[i - 1] - 1e-12) {
      throw new SchemaError(`${source}: curve ${curve.id}: F decreases at row ${i}`);
    }
  }
}

/** Read and merge several curve files; later files may not redefine an id. */
export function loadCurves(paths: string[]): Map<string, Curve> {
  if (paths.length === 0) throw new SchemaError("no input files given");
  const merged = new Map<string, Curve>();
  for (const p of paths) {
    const curves = parseCurvesCsv(readFileSync(p, "utf8"), p);
    for (const [id, curve] of curves) {
      if (merged.has(id)) {
        throw new SchemaError(`curve ${id} appears in more than one input file`);
      }
      merged.set(id, curve);
    }
  }
  return merged;
}
