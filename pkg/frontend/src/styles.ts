/** One fixed colour/marker per method across every figure. */

export type Marker =
  | "circle"
  | "square"
  | "triangle"
  | "diamond"
  | "plus"
  | "cross";

export interface MethodStyle {
  color: string;
  marker: Marker;
  label: string;
}

export const METHOD_STYLES: Record<string, MethodStyle> = {
  oracle: { color: "#1f77b4", marker: "circle", label: "Oracle" },
  quasi_oracle: { color: "#ff7f0e", marker: "square", label: "Quasi-oracle" },
  pre_oracle: { color: "#2ca02c", marker: "triangle", label: "Pre-oracle" },
  random: { color: "#d62728", marker: "diamond", label: "Random projection" },
  panel_known_var: { color: "#9467bd", marker: "plus", label: "Panel (known var)" },
  panel_est_var: { color: "#8c564b", marker: "cross", label: "Panel (est. var)" },
  search: { color: "#17becf", marker: "circle", label: "Search projection" },
};

const FALLBACK_COLORS = ["#e377c2", "#bcbd22", "#7f7f7f", "#aec7e8"];
const FALLBACK_MARKERS: Marker[] = ["circle", "square", "triangle", "diamond"];

/** Style for a method, stable for unknown names by first-appearance index. */
export function styleFor(method: string, index: number): MethodStyle {
  const known = METHOD_STYLES[method];
  if (known) return known;
  return {
    color: FALLBACK_COLORS[index % FALLBACK_COLORS.length],
    marker: FALLBACK_MARKERS[index % FALLBACK_MARKERS.length],
    label: method,
  };
}
