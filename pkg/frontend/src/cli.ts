#!/usr/bin/env node
/**
 * vdplot <kind> --in <csv> [--in2 <csv>] --out <img>
 *
 * Renders one runner table (plus an optional overlay table of the same
 * schema) to an SVG figure.  Exit codes: 0 figure written, 2 the input
 * does not conform to the documented schema, 1 usage or I/O failure.
 */

import { readFileSync, writeFileSync } from "fs";

import { CsvError, Table, parseCsv } from "./csv";
import { FigureError, renderFigure } from "./figures";
import { FIGURE_KINDS, headerProblems, isFigureKind } from "./schema";

interface Args {
  kind: string;
  inPath: string;
  in2Path?: string;
  outPath: string;
}

const USAGE = `usage: vdplot <kind> --in <csv> [--in2 <csv>] --out <img>
  kinds: ${FIGURE_KINDS.join(", ")}`;

function parseArgs(argv: string[]): Args {
  if (argv.length === 0) throw new Error(USAGE);
  const [kind, ...rest] = argv;
  const flags: Record<string, string> = {};
  for (let i = 0; i < rest.length; i += 2) {
    const name = rest[i];
    const value = rest[i + 1];
    if (!name.startsWith("--") || value === undefined) throw new Error(USAGE);
    flags[name.slice(2)] = value;
  }
  const known = new Set(["in", "in2", "out"]);
  for (const f of Object.keys(flags)) {
    if (!known.has(f)) throw new Error(`unknown option --${f}\n${USAGE}`);
  }
  if (!flags.in || !flags.out) throw new Error(USAGE);
  return { kind, inPath: flags.in, in2Path: flags.in2, outPath: flags.out };
}

function loadValidated(kind: string, path: string): Table {
  if (!isFigureKind(kind)) throw new Error("unreachable");
  const table = parseCsv(readFileSync(path, "utf8"));
  const problems = headerProblems(kind, table.header);
  if (problems.length > 0) {
    throw new CsvError(`${path} does not match the ${kind} schema: ${problems.join("; ")}`);
  }
  return table;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error((e as Error).message);
    return 1;
  }
  if (!isFigureKind(args.kind)) {
    console.error(`unknown figure kind '${args.kind}'\n${USAGE}`);
    return 1;
  }
  let svg: string;
  try {
    const input = loadValidated(args.kind, args.inPath);
    const input2 = args.in2Path ? loadValidated(args.kind, args.in2Path) : undefined;
    svg = renderFigure({ kind: args.kind, input, input2 });
  } catch (e) {
    if (e instanceof CsvError || e instanceof FigureError) {
      console.error(`vdplot: ${e.message}`);
      return 2;
    }
    console.error(`vdplot: ${(e as Error).message}`);
    return 1;
  }
  try {
    writeFileSync(args.outPath, svg);
  } catch (e) {
    console.error(`vdplot: cannot write ${args.outPath}: ${(e as Error).message}`);
    return 1;
  }
  console.log(`wrote ${args.outPath}`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
