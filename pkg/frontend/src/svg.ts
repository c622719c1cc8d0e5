/** Minimal deterministic SVG line plots: no timestamps, no randomness,
 *  fixed number formatting, so identical input renders identical bytes. */

export type XScale = "linear" | "log" | "pi";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  kind: "line" | "dashed" | "markers";
  color: string;
}

export interface VLine {
  x: number;
  label?: string;
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: XScale;
  series: Series[];
  vlines?: VLine[];
}

const W = 760;
const H = 500;
const M = { left: 64, right: 16, top: 36, bottom: 48 };
const PI = Math.PI;

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#17becf", "#e377c2", "#7f7f7f", "#bcbd22",
];

function fmt(v: number): string {
  return v.toFixed(2);
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo || 1;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (m * mag >= step0) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push(t);
  }
  return ticks;
}

function piTickLabel(multipleOfHalfPi: number): string {
  const names = ["0", "π/2", "π", "3π/2", "2π"];
  if (multipleOfHalfPi < names.length) return names[multipleOfHalfPi];
  return `${multipleOfHalfPi}π/2`;
}

export function renderSvg(spec: PlotSpec): string {
  const xs = spec.series.flatMap((s) => s.x);
  const ys = spec.series.flatMap((s) => s.y);
  if (xs.length === 0) throw new Error("nothing to plot");

  let xlo: number;
  let xhi: number;
  if (spec.xScale === "pi") {
    xlo = 0;
    xhi = 2 * PI;
  } else if (spec.xScale === "log") {
    const positive = xs.filter((v) => v > 0);
    xlo = Math.log10(Math.min(...positive));
    xhi = Math.log10(Math.max(...positive));
    xlo = Math.floor(xlo);
    xhi = Math.ceil(xhi);
    if (xhi === xlo) xhi = xlo + 1;
  } else {
    xlo = Math.min(...xs);
    xhi = Math.max(...xs);
    if (xhi === xlo) xhi = xlo + 1;
  }
  const ylo = Math.min(0, ...ys);
  const yhi = Math.max(1, ...ys);

  const tx = (v: number): number => {
    const raw = spec.xScale === "log" ? Math.log10(v) : v;
    return M.left + ((raw - xlo) / (xhi - xlo)) * (W - M.left - M.right);
  };
  const ty = (v: number): number =>
    H - M.bottom - ((v - ylo) / (yhi - ylo)) * (H - M.top - M.bottom);

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" ` +
      `viewBox="0 0 ${W} ${H}" font-family="Helvetica,Arial,sans-serif" font-size="12">`
  );
  out.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  out.push(
    `<text x="${W / 2}" y="20" text-anchor="middle" font-size="14">${escapeXml(spec.title)}</text>`
  );

  // axes frame
  out.push(
    `<rect x="${M.left}" y="${M.top}" width="${W - M.left - M.right}" ` +
      `height="${H - M.top - M.bottom}" fill="none" stroke="#333"/>`
  );

  // x ticks
  let xticks: { v: number; label: string }[];
  if (spec.xScale === "pi") {
    xticks = [0, 1, 2, 3, 4].map((k) => ({ v: (k * PI) / 2, label: piTickLabel(k) }));
  } else if (spec.xScale === "log") {
    xticks = [];
    for (let k = xlo; k <= xhi; k++) {
      xticks.push({ v: Math.pow(10, k), label: k === 0 ? "1" : `1e${k}` });
    }
  } else {
    xticks = niceTicks(xlo, xhi).map((v) => ({ v, label: String(Number(v.toPrecision(6))) }));
  }
  for (const t of xticks) {
    const px = tx(t.v);
    if (px < M.left - 0.5 || px > W - M.right + 0.5) continue;
    out.push(
      `<line x1="${fmt(px)}" y1="${M.top}" x2="${fmt(px)}" y2="${H - M.bottom}" ` +
        `stroke="#ddd"/>`
    );
    out.push(
      `<text x="${fmt(px)}" y="${H - M.bottom + 18}" text-anchor="middle">${t.label}</text>`
    );
  }

  // y ticks at 0..1 in steps of 0.25 plus data extent
  for (const v of niceTicks(ylo, yhi, 5)) {
    const py = ty(v);
    out.push(
      `<line x1="${M.left}" y1="${fmt(py)}" x2="${W - M.right}" y2="${fmt(py)}" stroke="#ddd"/>`
    );
    out.push(
      `<text x="${M.left - 6}" y="${fmt(py + 4)}" text-anchor="end">${Number(
        v.toPrecision(4)
      )}</text>`
    );
  }

  // reference vertical lines
  for (const vl of spec.vlines ?? []) {
    const px = tx(vl.x);
    out.push(
      `<line x1="${fmt(px)}" y1="${M.top}" x2="${fmt(px)}" y2="${H - M.bottom}" ` +
        `stroke="#555" stroke-dasharray="6,4"/>`
    );
    if (vl.label) {
      out.push(
        `<text x="${fmt(px + 4)}" y="${M.top + 14}" fill="#555">${escapeXml(vl.label)}</text>`
      );
    }
  }

  // series
  for (const s of spec.series) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      if (spec.xScale === "log" && s.x[i] <= 0) continue;
      pts.push(`${fmt(tx(s.x[i]))},${fmt(ty(s.y[i]))}`);
    }
    if (pts.length === 0) continue;
    if (s.kind === "markers") {
      const stride = Math.max(1, Math.floor(pts.length / 40));
      for (let i = 0; i < pts.length; i += stride) {
        const [px, py] = pts[i].split(",");
        out.push(`<circle cx="${px}" cy="${py}" r="3" fill="none" stroke="${s.color}"/>`);
      }
    } else {
      const dash = s.kind === "dashed" ? ' stroke-dasharray="7,4"' : "";
      out.push(
        `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" ` +
          `stroke-width="1.5"${dash}/>`
      );
    }
  }

  // axis labels
  out.push(
    `<text x="${(M.left + W - M.right) / 2}" y="${H - 12}" text-anchor="middle">` +
      `${escapeXml(spec.xLabel)}</text>`
  );
  out.push(
    `<text x="16" y="${(M.top + H - M.bottom) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(M.top + H - M.bottom) / 2})">${escapeXml(spec.yLabel)}</text>`
  );

  // legend
  let ly = M.top + 10;
  for (const s of spec.series) {
    const lx = M.left + 12;
    if (s.kind === "markers") {
      out.push(`<circle cx="${lx + 9}" cy="${ly - 4}" r="3" fill="none" stroke="${s.color}"/>`);
    } else {
      const dash = s.kind === "dashed" ? ' stroke-dasharray="7,4"' : "";
      out.push(
        `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 18}" y2="${ly - 4}" ` +
          `stroke="${s.color}" stroke-width="1.5"${dash}/>`
      );
    }
    out.push(`<text x="${lx + 24}" y="${ly}">${escapeXml(s.label)}</text>`);
    ly += 16;
  }

  out.push("</svg>");
  return out.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
