/**
 * Command line: render figure images from harness CSVs.
 *
 *   hdchange-figures --figure 4 --csv figure4_angle0.csv ... --out fig4.svg
 *   hdchange-figures --all --csv-dir fixtures --out-dir out
 *
 * `--all` discovers `figure<N>_*.csv` files per figure and writes both
 * `figure<N>.svg` and `figure<N>.png` for each complete set.
 */

import { readdirSync } from "node:fs";
import { join } from "node:path";

import { FIGURE_SPECS } from "./figures.js";
import { renderFigureFile } from "./render.js";

interface Args {
  figure?: number;
  csv: string[];
  out?: string;
  all: boolean;
  csvDir?: string;
  outDir?: string;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { csv: [], all: false };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value for ${flag}`);
      return argv[i];
    };
    switch (flag) {
      case "--figure":
        args.figure = Number(next());
        break;
      case "--csv":
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          args.csv.push(argv[++i]);
        }
        break;
      case "--out":
        args.out = next();
        break;
      case "--all":
        args.all = true;
        break;
      case "--csv-dir":
        args.csvDir = next();
        break;
      case "--out-dir":
        args.outDir = next();
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  return args;
}

async function renderAll(csvDir: string, outDir: string): Promise<void> {
  const files = readdirSync(csvDir).filter((f) => f.endsWith(".csv"));
  for (const id of Object.keys(FIGURE_SPECS).map(Number)) {
    const panelFiles = files
      .filter((f) => f.startsWith(`figure${id}_`))
      .sort()
      .map((f) => join(csvDir, f));
    if (panelFiles.length === 0) continue;
    for (const ext of ["svg", "png"]) {
      const out = join(outDir, `figure${id}.${ext}`);
      await renderFigureFile(id, panelFiles, out);
      console.log(out);
    }
  }
}

export async function main(argv: string[]): Promise<number> {
  try {
    const args = parseArgs(argv);
    if (args.all) {
      if (!args.csvDir || !args.outDir) {
        throw new Error("--all requires --csv-dir and --out-dir");
      }
      await renderAll(args.csvDir, args.outDir);
      return 0;
    }
    if (args.figure === undefined || args.csv.length === 0 || !args.out) {
      throw new Error("need --figure, --csv files and --out (or --all)");
    }
    await renderFigureFile(args.figure, args.csv, args.out);
    console.log(args.out);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
