/**
 * Minimal deterministic SVG chart builder: linear axes, tick labels,
 * polyline series, dashed reference lines, and a simple legend.  All
 * coordinates are emitted with fixed precision so identical inputs yield
 * byte-identical documents.
 */

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label?: string;
  dash?: string;
  width?: number;
}

export interface RefLine {
  axis: "x" | "y";
  value: number;
  color: string;
  label?: string;
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  refLines?: RefLine[];
  xLim?: [number, number];
  yLim?: [number, number];
  legend?: boolean;
}

const FONT = "DejaVu Sans";

function fmt(v: number): string {
  return v.toFixed(2);
}

function tickLabel(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-3)) {
    return v.toExponential(1);
  }
  const s = v.toPrecision(6);
  return String(Number(s));
}

export function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / target)));
  let step = step0;
  for (const m of [1, 2, 5, 10]) {
    if (span / (step0 * m) <= target) {
      step = step0 * m;
      break;
    }
  }
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function dataRange(values: number[], lim?: [number, number]): [number, number] {
  if (lim) return lim;
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.04 * (hi - lo);
  return [lo - pad, hi + pad];
}

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render one panel into SVG elements positioned inside the given box. */
function renderPanel(p: PanelSpec, x0: number, y0: number, w: number, h: number): string {
  const margin = { left: 58, right: 12, top: 26, bottom: 40 };
  const plotW = w - margin.left - margin.right;
  const plotH = h - margin.top - margin.bottom;
  const px = x0 + margin.left;
  const py = y0 + margin.top;

  const allX = p.series.flatMap((s) => s.x);
  const allY = p.series.flatMap((s) => s.y);
  const [xLo, xHi] = dataRange(allX, p.xLim);
  const [yLo, yHi] = dataRange(allY, p.yLim);
  const sx = (v: number) => px + ((v - xLo) / (xHi - xLo)) * plotW;
  const sy = (v: number) => py + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(`<rect x="${fmt(px)}" y="${fmt(py)}" width="${fmt(plotW)}" height="${fmt(plotH)}" fill="white" stroke="none"/>`);

  for (const t of niceTicks(xLo, xHi)) {
    const X = sx(t);
    parts.push(`<line x1="${fmt(X)}" y1="${fmt(py)}" x2="${fmt(X)}" y2="${fmt(py + plotH)}" stroke="#dddddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${fmt(X)}" y="${fmt(py + plotH + 14)}" font-family="${FONT}" font-size="9" text-anchor="middle">${tickLabel(t)}</text>`);
  }
  for (const t of niceTicks(yLo, yHi)) {
    const Y = sy(t);
    parts.push(`<line x1="${fmt(px)}" y1="${fmt(Y)}" x2="${fmt(px + plotW)}" y2="${fmt(Y)}" stroke="#dddddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${fmt(px - 5)}" y="${fmt(Y + 3)}" font-family="${FONT}" font-size="9" text-anchor="end">${tickLabel(t)}</text>`);
  }

  for (const ref of p.refLines ?? []) {
    if (ref.axis === "y") {
      if (ref.value < yLo || ref.value > yHi) continue;
      const Y = sy(ref.value);
      parts.push(`<line x1="${fmt(px)}" y1="${fmt(Y)}" x2="${fmt(px + plotW)}" y2="${fmt(Y)}" stroke="${ref.color}" stroke-width="1" stroke-dasharray="5,3"/>`);
    } else {
      if (ref.value < xLo || ref.value > xHi) continue;
      const X = sx(ref.value);
      parts.push(`<line x1="${fmt(X)}" y1="${fmt(py)}" x2="${fmt(X)}" y2="${fmt(py + plotH)}" stroke="${ref.color}" stroke-width="1" stroke-dasharray="5,3"/>`);
    }
  }

  for (const s of p.series) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const X = s.x[i];
      const Y = s.y[i];
      if (X < xLo || X > xHi || Y < yLo || Y > yHi) {
        continue; // simple clipping: drop out-of-window points
      }
      pts.push(`${fmt(sx(X))},${fmt(sy(Y))}`);
    }
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1}"${dash}/>`);
  }

  // frame on top of the data
  parts.push(`<rect x="${fmt(px)}" y="${fmt(py)}" width="${fmt(plotW)}" height="${fmt(plotH)}" fill="none" stroke="black" stroke-width="1"/>`);
  parts.push(`<text x="${fmt(px + plotW / 2)}" y="${fmt(y0 + 15)}" font-family="${FONT}" font-size="11" text-anchor="middle">${escapeText(p.title)}</text>`);
  parts.push(`<text x="${fmt(px + plotW / 2)}" y="${fmt(py + plotH + 30)}" font-family="${FONT}" font-size="10" text-anchor="middle">${escapeText(p.xLabel)}</text>`);
  parts.push(`<text x="${fmt(x0 + 14)}" y="${fmt(py + plotH / 2)}" font-family="${FONT}" font-size="10" text-anchor="middle" transform="rotate(-90 ${fmt(x0 + 14)} ${fmt(py + plotH / 2)})">${escapeText(p.yLabel)}</text>`);

  if (p.legend !== false) {
    let ly = py + 12;
    for (const s of p.series) {
      if (!s.label) continue;
      parts.push(`<line x1="${fmt(px + plotW - 78)}" y1="${fmt(ly - 3)}" x2="${fmt(px + plotW - 60)}" y2="${fmt(ly - 3)}" stroke="${s.color}" stroke-width="2"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`);
      parts.push(`<text x="${fmt(px + plotW - 56)}" y="${fmt(ly)}" font-family="${FONT}" font-size="9">${escapeText(s.label)}</text>`);
      ly += 13;
    }
  }
  return parts.join("\n");
}

/** Compose panels in a fixed grid into a complete SVG document. */
export function renderFigure(panels: PanelSpec[], cols: number,
                             panelW = 430, panelH = 300): string {
  const rows = Math.ceil(panels.length / cols);
  const width = cols * panelW;
  const height = rows * panelH;
  const body = panels
    .map((p, i) => renderPanel(p, (i % cols) * panelW, Math.floor(i / cols) * panelH, panelW, panelH))
    .join("\n");
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n${body}\n</svg>\n`;
}
