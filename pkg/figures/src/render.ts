/**
 * SVG rasterization with a pinned font so repeated renders are
 * byte-identical.
 */
import { existsSync, mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";
import { Resvg } from "@resvg/resvg-js";

const FONT_CANDIDATES = [
  "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf",
  "/usr/share/fonts/dejavu/DejaVuSans.ttf",
];

export function fontFiles(): string[] {
  return FONT_CANDIDATES.filter(existsSync);
}

export function svgToPng(svg: string): Buffer {
  const fonts = fontFiles();
  const resvg = new Resvg(svg, {
    font: {
      loadSystemFonts: fonts.length === 0,
      fontFiles: fonts,
      defaultFontFamily: "DejaVu Sans",
    },
  });
  return Buffer.from(resvg.render().asPng());
}

/** Write the figure as PNG (plus the SVG source alongside it). */
export function writeFigure(svg: string, pngPath: string): void {
  mkdirSync(dirname(pngPath), { recursive: true });
  writeFileSync(pngPath.replace(/\.png$/, ".svg"), svg, "utf-8");
  writeFileSync(pngPath, svgToPng(svg));
}
