/** Tiny deterministic SVG builder: fixed float formatting, no timestamps. */

import type { Marker } from "./styles.js";

/** Two-decimal fixed formatting keeps output byte-stable across platforms. */
export function px(value: number): string {
  return value.toFixed(2);
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function polyline(
  points: Array<[number, number]>,
  color: string,
): string {
  const d = points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${px(x)} ${px(y)}`)
    .join(" ");
  return `<path d="${d}" fill="none" stroke="${color}" stroke-width="1.6"/>`;
}

export function marker(
  kind: Marker,
  x: number,
  y: number,
  color: string,
  r = 3.2,
): string {
  switch (kind) {
    case "circle":
      return `<circle cx="${px(x)}" cy="${px(y)}" r="${px(r)}" fill="${color}"/>`;
    case "square":
      return `<rect x="${px(x - r)}" y="${px(y - r)}" width="${px(2 * r)}" height="${px(2 * r)}" fill="${color}"/>`;
    case "triangle":
      return `<path d="M${px(x)} ${px(y - r)} L${px(x + r)} ${px(y + r)} L${px(x - r)} ${px(y + r)} Z" fill="${color}"/>`;
    case "diamond":
      return `<path d="M${px(x)} ${px(y - r)} L${px(x + r)} ${px(y)} L${px(x)} ${px(y + r)} L${px(x - r)} ${px(y)} Z" fill="${color}"/>`;
    case "plus":
      return `<path d="M${px(x - r)} ${px(y)} H${px(x + r)} M${px(x)} ${px(y - r)} V${px(y + r)}" stroke="${color}" stroke-width="1.8" fill="none"/>`;
    case "cross":
      return `<path d="M${px(x - r)} ${px(y - r)} L${px(x + r)} ${px(y + r)} M${px(x - r)} ${px(y + r)} L${px(x + r)} ${px(y - r)}" stroke="${color}" stroke-width="1.8" fill="none"/>`;
  }
}

export function text(
  content: string,
  x: number,
  y: number,
  opts: { size?: number; anchor?: string; rotate?: boolean } = {},
): string {
  const size = opts.size ?? 11;
  const anchor = opts.anchor ?? "start";
  const transform = opts.rotate
    ? ` transform="rotate(-90 ${px(x)} ${px(y)})"`
    : "";
  return (
    `<text x="${px(x)}" y="${px(y)}" font-family="Helvetica, Arial, sans-serif"` +
    ` font-size="${size}" text-anchor="${anchor}"${transform}>` +
    `${esc(content)}</text>`
  );
}

/** Short tick label: trims trailing zeros of a 3-decimal rendering. */
export function tickLabel(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return value
    .toFixed(3)
    .replace(/0+$/, "")
    .replace(/\.$/, "");
}
