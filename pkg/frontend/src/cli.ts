#!/usr/bin/env node
/**
 * render --csv <path> --kind <excess_variance|trim_variance> --out <svg>
 *        [--x m|fraction] [--floor <value>] [--title <text>]
 *
 * Exit codes: 0 success, 2 schema or empty-plot error, 1 I/O error.
 */

import * as fs from "node:fs";

import { parseResultCsv, SchemaError } from "./csv";
import { EmptyPlotError, FigureKind, renderSvg, XAxis } from "./figure";

interface Args {
  csv: string;
  kind: FigureKind;
  out: string;
  x: XAxis;
  floor?: number;
  title?: string;
}

function parseArgs(argv: string[]): Args {
  if (argv[0] !== "render") {
    throw new Error(`unknown command ${JSON.stringify(argv[0])}; expected "render"`);
  }
  const opts = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`malformed option pair near ${key}`);
    }
    opts.set(key.slice(2), value);
  }
  for (const required of ["csv", "kind", "out"]) {
    if (!opts.has(required)) {
      throw new Error(`missing required option --${required}`);
    }
  }
  const kind = opts.get("kind")!;
  if (kind !== "excess_variance" && kind !== "trim_variance") {
    throw new Error(`--kind must be excess_variance or trim_variance, got ${kind}`);
  }
  const x = opts.get("x") ?? "m";
  if (x !== "m" && x !== "fraction") {
    throw new Error(`--x must be m or fraction, got ${x}`);
  }
  return {
    csv: opts.get("csv")!,
    kind,
    out: opts.get("out")!,
    x,
    floor: opts.has("floor") ? Number(opts.get("floor")) : undefined,
    title: opts.get("title"),
  };
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }

  let text: string;
  try {
    text = fs.readFileSync(args.csv, "utf8");
  } catch (err) {
    console.error(`cannot read ${args.csv}: ${(err as Error).message}`);
    return 1;
  }

  let svg: string;
  try {
    const rows = parseResultCsv(text);
    svg = renderSvg(rows, {
      kind: args.kind,
      xAxis: args.x,
      clipFloor: args.floor,
      title: args.title,
    });
  } catch (err) {
    if (err instanceof SchemaError || err instanceof EmptyPlotError) {
      console.error(err.message);
      return 2;
    }
    console.error((err as Error).message);
    return 2;
  }

  try {
    fs.writeFileSync(args.out, svg, "utf8");
  } catch (err) {
    console.error(`cannot write ${args.out}: ${(err as Error).message}`);
    return 1;
  }
  return 0;
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)));
}
