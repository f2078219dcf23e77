/**
 * Figure builders: map run CSVs onto the benchmark figure layouts.
 *
 * Quadratic runs get two-panel output/input histories (full range plus a
 * fixed zoom), wheel runs get the four-panel layout (friction vs time,
 * velocity vs time, slip and slip command vs time, friction vs slip with the
 * analytic curve overlay).  The friction-curve overlay is always computed
 * from the formula, never taken from simulation data.
 */
import { RunData, requireColumns } from "./csv";
import { PanelSpec, renderFigure, Series } from "./svg";

export interface FrictionParams {
  lambdaStar: number;
  muStar: number;
}

export const DEFAULT_FRICTION: FrictionParams = { lambdaStar: 0.25, muStar: 0.6 };

export function muLambda(lam: number, p: FrictionParams): number {
  const l = Math.abs(lam);
  return (2 * p.muStar * p.lambdaStar * l) / (p.lambdaStar * p.lambdaStar + l * l);
}

const MODE_COLORS: Record<string, string> = {
  hpf: "#1f77b4", esc: "#1f77b4", aise: "#d62728", "esc-aise": "#d62728",
};
const MODE_LABELS: Record<string, string> = {
  hpf: "ESC", esc: "ESC", aise: "ESC/AISE", "esc-aise": "ESC/AISE",
};

function modeColor(run: RunData): string {
  return MODE_COLORS[run.meta["mode"] ?? ""] ?? "#2ca02c";
}

function modeLabel(run: RunData): string {
  return MODE_LABELS[run.meta["mode"] ?? ""] ?? (run.meta["mode"] ?? "run");
}

function seriesOf(run: RunData, xCol: string, yCol: string): Series {
  requireColumns(run, [xCol, yCol]);
  return {
    x: run.columns[xCol],
    y: run.columns[yCol],
    color: modeColor(run),
    label: modeLabel(run),
  };
}

/** Sensor-noise trace (one run suffices; the trace is mode-independent). */
export function noiseFigure(run: RunData): string {
  requireColumns(run, ["k", "v"]);
  const panel: PanelSpec = {
    title: "Sensor noise",
    xLabel: "step k",
    yLabel: "v",
    series: [{ x: run.columns["k"], y: run.columns["v"], color: "#1f77b4" }],
    legend: false,
  };
  return renderFigure([panel], 1, 640, 320);
}

/** Two panels: full output history plus a fixed vertical zoom. */
export function outputHistoryFigure(runs: RunData[], zoom: [number, number] = [0, 0.8]): string {
  const series = runs.map((r) => seriesOf(r, "k", "y"));
  const a: PanelSpec = {
    title: "a) system output",
    xLabel: "step k",
    yLabel: "y",
    series,
  };
  const b: PanelSpec = {
    title: `b) output, y in [${zoom[0]}, ${zoom[1]}]`,
    xLabel: "step k",
    yLabel: "y",
    series,
    yLim: zoom,
  };
  return renderFigure([a, b], 2);
}

/** Two panels: full input history plus a fixed vertical zoom. */
export function inputHistoryFigure(runs: RunData[], zoom: [number, number] = [-1.5, 1.5]): string {
  const series = runs.map((r) => seriesOf(r, "k", "u"));
  const a: PanelSpec = {
    title: "a) control input",
    xLabel: "step k",
    yLabel: "u",
    series,
  };
  const b: PanelSpec = {
    title: `b) input, u in [${zoom[0]}, ${zoom[1]}]`,
    xLabel: "step k",
    yLabel: "u",
    series,
    yLim: zoom,
  };
  return renderFigure([a, b], 2);
}

/** Analytic friction-coefficient curve with the peak-slip marker. */
export function muLambdaCurveFigure(p: FrictionParams = DEFAULT_FRICTION): string {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i <= 400; i++) {
    const lam = i / 400;
    xs.push(lam);
    ys.push(muLambda(lam, p));
  }
  const panel: PanelSpec = {
    title: "friction coefficient vs slip",
    xLabel: "slip",
    yLabel: "mu",
    series: [{ x: xs, y: ys, color: "#d62728", label: "mu(slip)" }],
    refLines: [{ axis: "x", value: p.lambdaStar, color: "#2ca02c" }],
  };
  return renderFigure([panel], 1, 640, 360);
}

/** Four-panel wheel layout for one run. */
export function absPanelsFigure(run: RunData, p: FrictionParams = DEFAULT_FRICTION): string {
  requireColumns(run, ["t", "u", "mu", "nu", "lambda"]);
  const t = run.columns["t"];
  const color = modeColor(run);
  const label = modeLabel(run);

  const a: PanelSpec = {
    title: "a) friction coefficient vs time",
    xLabel: "t (s)",
    yLabel: "mu",
    series: [{ x: t, y: run.columns["mu"], color, label }],
    refLines: [{ axis: "y", value: p.muStar, color: "#d62728" }],
  };
  const b: PanelSpec = {
    title: "b) forward velocity vs time",
    xLabel: "t (s)",
    yLabel: "nu (m/s)",
    series: [{ x: t, y: run.columns["nu"], color, label }],
  };
  const c: PanelSpec = {
    title: "c) slip and slip command vs time",
    xLabel: "t (s)",
    yLabel: "slip",
    series: [
      { x: t, y: run.columns["lambda"], color, label: "slip" },
      { x: t, y: run.columns["u"], color: "#ff7f0e", label: "command", dash: "4,3" },
    ],
  };
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i <= 400; i++) {
    const lam = i / 400;
    xs.push(lam);
    ys.push(muLambda(lam, p));
  }
  const d: PanelSpec = {
    title: "d) friction vs slip over the run",
    xLabel: "slip",
    yLabel: "mu",
    series: [
      { x: xs, y: ys, color: "#d62728", label: "mu(slip)" },
      { x: run.columns["lambda"], y: run.columns["mu"], color, label },
    ],
    refLines: [{ axis: "x", value: p.lambdaStar, color: "#2ca02c" }],
    xLim: [0, 1],
  };
  return renderFigure([a, b, c, d], 2);
}
