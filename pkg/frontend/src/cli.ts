import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { parseReportCsv, SchemaError } from "./csv.js";
import { FigureKind, render } from "./plots.js";

interface Args {
  input: string;
  kind: FigureKind;
  output: string;
}

export function parseArgs(argv: string[]): Args {
  let input = "";
  let kind: FigureKind = "violin";
  let output = "";
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--in") input = argv[++i] ?? "";
    else if (a === "--kind") kind = (argv[++i] ?? "") as FigureKind;
    else if (a === "--out") output = argv[++i] ?? "";
    else throw new Error(`unknown argument: ${a}`);
  }
  if (!input || !output) {
    throw new Error("usage: plots --in report.csv --kind violin|ratio-curves --out fig.svg");
  }
  if (kind !== "violin" && kind !== "ratio-curves") {
    throw new Error(`unknown figure kind: ${kind}`);
  }
  return { input, kind, output };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const rows = parseReportCsv(readFileSync(args.input, "utf-8"));
    const svg = render({ rows, kind: args.kind, title: basename(args.input) });
    writeFileSync(args.output, svg);
    console.log(`wrote ${args.output}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && /cli\.js$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
