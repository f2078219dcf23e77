import { describe, expect, it } from "vitest";
import { join } from "path";
import { parseRun } from "../src/csv";
import {
  DEFAULT_FRICTION,
  absPanelsFigure,
  inputHistoryFigure,
  muLambda,
  muLambdaCurveFigure,
  noiseFigure,
  outputHistoryFigure,
} from "../src/figures";
import { niceTicks } from "../src/svg";
import { svgToPng } from "../src/render";

const FIX = join(__dirname, "fixtures");

describe("axis ticks", () => {
  it("covers the range with round steps", () => {
    const t = niceTicks(0, 10);
    expect(t[0]).toBe(0);
    expect(t[t.length - 1]).toBe(10);
    expect(t).toContain(2);
  });

  it("handles degenerate ranges", () => {
    expect(niceTicks(3, 3).length).toBeGreaterThan(0);
  });
});

describe("friction curve overlay", () => {
  it("peaks at the nominal slip", () => {
    expect(muLambda(DEFAULT_FRICTION.lambdaStar, DEFAULT_FRICTION)).toBeCloseTo(
      DEFAULT_FRICTION.muStar, 12);
    expect(muLambda(0, DEFAULT_FRICTION)).toBe(0);
    expect(muLambda(0.5, DEFAULT_FRICTION)).toBeCloseTo(0.48, 12);
  });
});

describe("figure builders", () => {
  const quad = parseRun(join(FIX, "quad_hpf.csv"));
  const wheel = parseRun(join(FIX, "abs_aise.csv"));

  it("two-panel output history", () => {
    const svg = outputHistoryFigure([quad]);
    expect(svg).toContain("a) system output");
    expect(svg).toContain("b) output, y in [0, 0.8]");
    expect((svg.match(/<polyline/g) ?? []).length).toBeGreaterThanOrEqual(2);
  });

  it("two-panel input history honours the zoom", () => {
    const svg = inputHistoryFigure([quad], [-1.5, 1.5]);
    expect(svg).toContain("b) input, u in [-1.5, 1.5]");
  });

  it("four-panel wheel layout with curve overlay and slip marker", () => {
    const svg = absPanelsFigure(wheel);
    for (const title of ["a) friction coefficient vs time", "b) forward velocity vs time",
                         "c) slip and slip command vs time", "d) friction vs slip over the run"]) {
      expect(svg).toContain(title);
    }
    // the analytic overlay and the vertical peak-slip marker are present
    expect(svg).toContain("mu(slip)");
    expect(svg).toContain('stroke-dasharray="5,3"');
  });

  it("rejects quadratic data for the wheel layout, naming the column", () => {
    expect(() => absPanelsFigure(quad)).toThrow(/missing column/);
  });

  it("noise figure builds from any run", () => {
    expect(noiseFigure(quad)).toContain("Sensor noise");
  });

  it("standalone friction curve", () => {
    expect(muLambdaCurveFigure()).toContain("friction coefficient vs slip");
  });
});

describe("determinism", () => {
  it("identical inputs give byte-identical SVG and PNG", () => {
    const wheel = parseRun(join(FIX, "abs_aise.csv"));
    const svg1 = absPanelsFigure(wheel);
    const svg2 = absPanelsFigure(parseRun(join(FIX, "abs_aise.csv")));
    expect(svg1).toBe(svg2);
    const png1 = svgToPng(svg1);
    const png2 = svgToPng(svg2);
    expect(Buffer.compare(png1, png2)).toBe(0);
    expect(png1.subarray(1, 4).toString()).toBe("PNG");
  });
});
