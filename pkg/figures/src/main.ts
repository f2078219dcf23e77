/**
 * Figure regeneration entry point: scans a directory of ditherseek run CSVs
 * and emits the benchmark figure set.
 *
 *   node dist/main.js [--in ../out] [--figs ../figs]
 *
 * Quadratic runs yield the noise trace plus two-panel output/input
 * histories (both controller modes overlaid when present); each wheel run
 * yields a four-panel figure, plus the analytic friction curve.
 */
import { readdirSync } from "fs";
import { join, resolve } from "path";
import { parseRun, RunData } from "./csv";
import {
  absPanelsFigure,
  inputHistoryFigure,
  muLambdaCurveFigure,
  noiseFigure,
  outputHistoryFigure,
} from "./figures";
import { writeFigure } from "./render";

function argValue(flag: string, fallback: string): string {
  const idx = process.argv.indexOf(flag);
  return idx >= 0 && idx + 1 < process.argv.length ? process.argv[idx + 1] : fallback;
}

export function generateAll(inDir: string, figsDir: string): string[] {
  const files = readdirSync(inDir).filter((f) => f.endsWith(".csv")).sort();
  const runs: RunData[] = [];
  for (const f of files) {
    try {
      runs.push(parseRun(join(inDir, f)));
    } catch {
      // not a run file (e.g. a sweep CSV); skip
    }
  }
  const quad = runs.filter((r) => r.meta["plant"] === "quadratic");
  const wheel = runs.filter((r) => r.meta["plant"] === "abs");
  const written: string[] = [];

  const emit = (name: string, svg: string) => {
    const path = join(figsDir, name);
    writeFigure(svg, path);
    written.push(path);
  };

  if (quad.length > 0) {
    emit("quadratic_noise.png", noiseFigure(quad[0]));
    emit("quadratic_output.png", outputHistoryFigure(quad));
    emit("quadratic_input.png", inputHistoryFigure(quad));
  }
  if (wheel.length > 0) {
    emit("abs_noise.png", noiseFigure(wheel[0]));
    emit("mu_lambda_curve.png", muLambdaCurveFigure());
    for (const run of wheel) {
      const mode = run.meta["mode"] ?? "run";
      emit(`abs_panels_${mode}.png`, absPanelsFigure(run));
    }
  }
  return written;
}

if (require.main === module) {
  const inDir = resolve(argValue("--in", "../out"));
  const figsDir = resolve(argValue("--figs", "../figs"));
  const written = generateAll(inDir, figsDir);
  if (written.length === 0) {
    console.error(`no run CSVs found in ${inDir}`);
    process.exit(1);
  }
  for (const p of written) console.log(`wrote ${p}`);
}
