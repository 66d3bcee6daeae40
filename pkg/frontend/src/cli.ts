#!/usr/bin/env node
/**
 * render_figures <kind> <csv...> --out <path>
 *
 * kinds: objective-vs-alpha | params-vs-alpha | threshold-vs-alpha | comparison
 */

import { FigureKind, KINDS, render } from "./render.js";
import { SchemaError } from "./schema.js";

function usage(): never {
  console.error(`usage: render_figures <${KINDS.join("|")}> <csv...> --out <path>`);
  process.exit(2);
}

export function main(argv: string[]): number {
  const args = [...argv];
  const outIdx = args.indexOf("--out");
  if (outIdx < 0 || outIdx + 1 >= args.length) usage();
  const out = args[outIdx + 1];
  args.splice(outIdx, 2);
  const [kind, ...inputs] = args;
  if (!kind || !(KINDS as readonly string[]).includes(kind)) usage();
  if (inputs.length === 0) usage();
  try {
    render({ kind: kind as FigureKind, inputs, out });
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`no such file: ${(err as NodeJS.ErrnoException).path}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${out}`);
  return 0;
}

const invoked = process.argv[1] && process.argv[1].endsWith("cli.js");
if (invoked) {
  process.exit(main(process.argv.slice(2)));
}
