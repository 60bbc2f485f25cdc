/**
 * Parser for the harness result CSVs.
 *
 * Expected layout:
 *
 *   # figure=4 panel=angle1 x=phi size_corrected=True
 *   # T=60 angle=0.392... d=12 level=0.05
 *   sweep_value,method,rejection_rate,mc_se,reps,seed
 *   0,oracle,0.241667,0.039079,120,40
 *   ...
 */

export class SchemaError extends Error {}

export interface SeriesPoint {
  x: number;
  rate: number;
  se: number;
}

export interface PanelData {
  figure: string;
  panel: string;
  xName: string;
  sizeCorrected: boolean;
  config: Record<string, string>;
  xValues: number[];
  /** method name -> points, in first-appearance order */
  methods: Map<string, SeriesPoint[]>;
}

const HEADER = "sweep_value,method,rejection_rate,mc_se,reps,seed";

function parseMeta(line: string): Record<string, string> {
  const out: Record<string, string> = {};
  for (const part of line.replace(/^#\s*/, "").split(/\s+/)) {
    const eq = part.indexOf("=");
    if (eq > 0) out[part.slice(0, eq)] = part.slice(eq + 1);
  }
  return out;
}

export function parsePanelCsv(text: string, source = "<csv>"): PanelData {
  const lines = text.split(/\r?\n/).filter((ln) => ln.trim().length > 0);
  const comments = lines.filter((ln) => ln.startsWith("#"));
  const body = lines.filter((ln) => !ln.startsWith("#"));
  if (comments.length === 0) {
    throw new SchemaError(`${source}: missing '#' metadata line`);
  }
  const meta = parseMeta(comments[0]);
  const config = comments.length > 1 ? parseMeta(comments[1]) : {};
  for (const key of ["figure", "panel", "x"]) {
    if (!(key in meta)) {
      throw new SchemaError(`${source}: metadata lacks '${key}'`);
    }
  }
  if (body.length === 0 || body[0] !== HEADER) {
    throw new SchemaError(
      `${source}: first data line must be the header '${HEADER}'`,
    );
  }

  const methods = new Map<string, SeriesPoint[]>();
  const xSeen: number[] = [];
  for (const [i, line] of body.slice(1).entries()) {
    const cells = line.split(",");
    if (cells.length !== 6) {
      throw new SchemaError(`${source}: row ${i + 2} has ${cells.length} cells`);
    }
    const x = Number(cells[0]);
    const method = cells[1];
    const rate = Number(cells[2]);
    const se = Number(cells[3]);
    if (!Number.isFinite(x) || !Number.isFinite(rate) || !Number.isFinite(se)) {
      throw new SchemaError(`${source}: row ${i + 2} has non-numeric cells`);
    }
    if (method.length === 0) {
      throw new SchemaError(`${source}: row ${i + 2} is missing the method`);
    }
    if (rate < 0 || rate > 1) {
      throw new SchemaError(`${source}: row ${i + 2} rate out of [0,1]`);
    }
    if (!methods.has(method)) methods.set(method, []);
    methods.get(method)!.push({ x, rate, se });
    if (xSeen.length === 0 || xSeen[xSeen.length - 1] !== x) xSeen.push(x);
  }
  if (methods.size === 0) {
    throw new SchemaError(`${source}: no data rows`);
  }
  const xValues = [...new Set(xSeen)];
  return {
    figure: meta.figure,
    panel: meta.panel,
    xName: meta.x,
    sizeCorrected: meta.size_corrected === "True",
    config,
    xValues,
    methods,
  };
}
