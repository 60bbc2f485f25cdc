/** Per-figure layout: panel grid, axis labels, and panel titles. */

import type { PanelData } from "./csv.js";

export interface FigureSpec {
  id: number;
  title: string;
  xLabel: string;
  /** panels per row */
  columns: number;
  /** number of CSV panels the figure expects */
  expectedPanels: number;
  panelTitle(panel: PanelData): string;
}

/** Format an angle (radians) as a pi fraction when it is one. */
function angleLabel(raw: string | undefined): string {
  const angle = Number(raw ?? "0");
  if (angle === 0) return "0";
  const sixteenths = (angle / Math.PI) * 16;
  const rounded = Math.round(sixteenths);
  if (Math.abs(sixteenths - rounded) < 1e-6 && rounded !== 0) {
    let num = rounded;
    let den = 16;
    while (num % 2 === 0 && den % 2 === 0) {
      num /= 2;
      den /= 2;
    }
    const top = num === 1 ? "π" : `${num}π`;
    return den === 1 ? top : `${top}/${den}`;
  }
  return angle.toFixed(3);
}

const POLICY_TITLES: Record<string, string> = {
  known: "Known variance",
  tau1: "Estimated variance (global)",
  tau2: "Estimated variance (split)",
};

export const FIGURE_SPECS: Record<number, FigureSpec> = {
  1: {
    id: 1,
    title: "Size as the cross-sectional dependency grows",
    xLabel: "dependency strength φ",
    columns: 3,
    expectedPanels: 3,
    panelTitle: (p) => POLICY_TITLES[p.panel] ?? p.panel,
  },
  2: {
    id: 2,
    title: "Power as the search direction rotates away from the change",
    xLabel: "angle (radians)",
    columns: 1,
    expectedPanels: 1,
    panelTitle: () => "",
  },
  3: {
    id: 3,
    title: "Power as the dimension grows at a fixed change size",
    xLabel: "dimension d",
    columns: 1,
    expectedPanels: 1,
    panelTitle: () => "",
  },
  4: {
    id: 4,
    title: "Power under a misspecified dependency structure",
    xLabel: "dependency strength φ",
    columns: 2,
    expectedPanels: 4,
    panelTitle: (p) => `angle(Δ, Φ) = ${angleLabel(p.config.angle)}`,
  },
  5: {
    id: 5,
    title: "Power vs change size under heterogeneous variances",
    xLabel: "change size (× √d)",
    columns: 3,
    expectedPanels: 3,
    panelTitle: (p) => `φ = ${p.config.phi ?? p.panel.replace("phi", "")}`,
  },
};
