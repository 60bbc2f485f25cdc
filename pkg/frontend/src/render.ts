/** Assemble one figure image from its panel CSVs. */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname } from "node:path";

import { PanelData, SchemaError, parsePanelCsv } from "./csv.js";
import { FIGURE_SPECS } from "./figures.js";
import { MethodStyle, styleFor } from "./styles.js";
import { marker, polyline, px, text, tickLabel } from "./svg.js";

const PANEL_W = 320;
const PANEL_H = 230;
const MARGIN = { left: 52, right: 14, top: 34, bottom: 40 };
const LEGEND_ROW_H = 18;

interface Scale {
  (value: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

function panelSvg(
  panel: PanelData,
  title: string,
  xLabel: string,
  styles: Map<string, MethodStyle>,
  originX: number,
  originY: number,
): string {
  const x0 = Math.min(...panel.xValues);
  const x1 = Math.max(...panel.xValues);
  const plotLeft = originX + MARGIN.left;
  const plotRight = originX + PANEL_W - MARGIN.right;
  const plotTop = originY + MARGIN.top;
  const plotBottom = originY + PANEL_H - MARGIN.bottom;
  const sx = linearScale(x0, x1, plotLeft, plotRight);
  const sy = linearScale(0, 1, plotBottom, plotTop); // rejection rate in [0,1]

  const parts: string[] = [`<g class="panel" data-panel="${panel.panel}">`];
  parts.push(
    `<rect x="${px(plotLeft)}" y="${px(plotTop)}" width="${px(plotRight - plotLeft)}" height="${px(plotBottom - plotTop)}" fill="none" stroke="#444" stroke-width="1"/>`,
  );
  if (title) {
    parts.push(
      text(title, originX + PANEL_W / 2, originY + MARGIN.top - 12, {
        anchor: "middle",
        size: 12,
      }),
    );
  }
  // y ticks at 0, 0.25, ..., 1 plus a dashed 5% reference line
  for (const yv of [0, 0.25, 0.5, 0.75, 1]) {
    const y = sy(yv);
    parts.push(
      `<line x1="${px(plotLeft - 4)}" y1="${px(y)}" x2="${px(plotLeft)}" y2="${px(y)}" stroke="#444"/>`,
      text(tickLabel(yv), plotLeft - 7, y + 3.5, { anchor: "end", size: 10 }),
    );
  }
  parts.push(
    `<line x1="${px(plotLeft)}" y1="${px(sy(0.05))}" x2="${px(plotRight)}" y2="${px(sy(0.05))}" stroke="#999" stroke-dasharray="4 3" stroke-width="0.8"/>`,
  );
  for (const xv of panel.xValues) {
    const x = sx(xv);
    parts.push(
      `<line x1="${px(x)}" y1="${px(plotBottom)}" x2="${px(x)}" y2="${px(plotBottom + 4)}" stroke="#444"/>`,
      text(tickLabel(xv), x, plotBottom + 15, { anchor: "middle", size: 10 }),
    );
  }
  parts.push(
    text(xLabel, (plotLeft + plotRight) / 2, originY + PANEL_H - 8, {
      anchor: "middle",
      size: 11,
    }),
    text("rejection rate", originX + 14, (plotTop + plotBottom) / 2, {
      anchor: "middle",
      size: 11,
      rotate: true,
    }),
  );
  for (const [name, points] of panel.methods) {
    const style = styles.get(name)!;
    const coords = points.map(
      (pt) => [sx(pt.x), sy(pt.rate)] as [number, number],
    );
    parts.push(polyline(coords, style.color));
    for (const [cx, cy] of coords) {
      parts.push(marker(style.marker, cx, cy, style.color));
    }
  }
  parts.push("</g>");
  return parts.join("\n");
}

export interface RenderedFigure {
  svg: string;
  width: number;
  height: number;
  methods: string[];
}

export function renderFigureSvg(
  figureId: number,
  csvTexts: Array<{ text: string; source: string }>,
): RenderedFigure {
  const spec = FIGURE_SPECS[figureId];
  if (!spec) throw new SchemaError(`unknown figure id ${figureId}`);
  const panels = csvTexts.map(({ text: t, source }) => parsePanelCsv(t, source));
  for (const p of panels) {
    if (p.figure !== String(figureId)) {
      throw new SchemaError(
        `panel '${p.panel}' belongs to figure ${p.figure}, not ${figureId}`,
      );
    }
  }
  if (panels.length !== spec.expectedPanels) {
    throw new SchemaError(
      `figure ${figureId} expects ${spec.expectedPanels} panel CSVs, got ${panels.length}`,
    );
  }
  panels.sort((a, b) => (a.panel < b.panel ? -1 : a.panel > b.panel ? 1 : 0));

  // union of methods in first-appearance order; every one enters the legend
  const methodOrder: string[] = [];
  for (const p of panels) {
    for (const name of p.methods.keys()) {
      if (!methodOrder.includes(name)) methodOrder.push(name);
    }
  }
  const styles = new Map(
    methodOrder.map((name, i) => [name, styleFor(name, i)]),
  );

  const columns = Math.min(spec.columns, panels.length);
  const rows = Math.ceil(panels.length / columns);
  const legendRows = Math.ceil(methodOrder.length / 3);
  const width = columns * PANEL_W;
  const height = 26 + rows * PANEL_H + legendRows * LEGEND_ROW_H + 12;

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    text(spec.title, width / 2, 18, { anchor: "middle", size: 14 }),
  ];
  panels.forEach((panel, i) => {
    const col = i % columns;
    const row = Math.floor(i / columns);
    parts.push(
      panelSvg(
        panel,
        spec.panelTitle(panel),
        spec.xLabel,
        styles,
        col * PANEL_W,
        26 + row * PANEL_H,
      ),
    );
  });
  // legend: three entries per row
  const legendTop = 26 + rows * PANEL_H + 10;
  parts.push(`<g class="legend">`);
  methodOrder.forEach((name, i) => {
    const col = i % 3;
    const row = Math.floor(i / 3);
    const x = 30 + col * (width / 3);
    const y = legendTop + row * LEGEND_ROW_H;
    const style = styles.get(name)!;
    parts.push(
      `<line x1="${px(x)}" y1="${px(y)}" x2="${px(x + 22)}" y2="${px(y)}" stroke="${style.color}" stroke-width="1.6"/>`,
      marker(style.marker, x + 11, y, style.color),
      text(style.label, x + 28, y + 3.5, { size: 11 }),
    );
  });
  parts.push("</g>", "</svg>");
  return { svg: parts.join("\n"), width, height, methods: methodOrder };
}

/**
 * Render a figure from CSV files and write the image.
 *
 * The output format follows the extension: `.svg` writes the deterministic
 * vector form, `.png` rasterizes the same SVG.
 */
export async function renderFigureFile(
  figureId: number,
  csvPaths: string[],
  outPath: string,
): Promise<RenderedFigure> {
  const texts = csvPaths.map((p) => ({
    text: readFileSync(p, "utf8"),
    source: p,
  }));
  const rendered = renderFigureSvg(figureId, texts);
  mkdirSync(dirname(outPath), { recursive: true });
  if (outPath.endsWith(".png")) {
    const { Resvg } = await import("@resvg/resvg-js");
    const png = new Resvg(rendered.svg, {
      fitTo: { mode: "width", value: rendered.width * 2 },
    })
      .render()
      .asPng();
    writeFileSync(outPath, png);
  } else if (outPath.endsWith(".svg")) {
    writeFileSync(outPath, rendered.svg, "utf8");
  } else {
    throw new SchemaError(`output must end in .svg or .png: ${outPath}`);
  }
  return rendered;
}
