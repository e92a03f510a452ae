/**
 * Exporter command line.
 *
 *   export-bank    --out bank.fbank [--taps relu1_1,relu2_1,relu3_1]
 *                  (--weights DIR | --synthetic-seed N)
 *                  [--mean a,b,c] [--std a,b,c]
 *   emit-fixtures  --bank bank.fbank --out-dir DIR
 *                  (--image path.rten | --image-seed N [--image-size 64])
 */

import { basename } from "node:path";
import process from "node:process";

import { emitFixtures, exportBank } from "./export.js";
import { DirWeightSource, SyntheticWeightSource, type WeightSource } from "./weights.js";

const DEFAULT_TAPS = "relu1_1,relu2_1,relu3_1";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`expected --flag value pairs, got ${key}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  return flags;
}

function require(flags: Map<string, string>, name: string): string {
  const v = flags.get(name);
  if (v === undefined) {
    throw new Error(`missing required flag --${name}`);
  }
  return v;
}

function parseTriple(text: string, what: string): Float32Array {
  const parts = text.split(",").map(Number);
  if (parts.length !== 3 || parts.some((v) => !Number.isFinite(v))) {
    throw new Error(`bad ${what} ${text}: expected three numbers`);
  }
  return Float32Array.from(parts);
}

function weightSource(flags: Map<string, string>): WeightSource {
  const dir = flags.get("weights");
  const seed = flags.get("synthetic-seed");
  if (dir !== undefined && seed !== undefined) {
    throw new Error("pass either --weights or --synthetic-seed, not both");
  }
  if (dir !== undefined) {
    return new DirWeightSource(dir);
  }
  if (seed !== undefined) {
    return new SyntheticWeightSource(Number(seed) >>> 0);
  }
  throw new Error(
    "no weight source: pass --weights DIR (local pretrained blobs) or --synthetic-seed N",
  );
}

function cmdExportBank(flags: Map<string, string>): void {
  const out = require(flags, "out");
  const taps = (flags.get("taps") ?? DEFAULT_TAPS).split(",").map((s) => s.trim());
  const payload = exportBank(
    {
      tapNames: taps,
      source: weightSource(flags),
      mean: flags.has("mean") ? parseTriple(flags.get("mean")!, "mean") : undefined,
      std: flags.has("std") ? parseTriple(flags.get("std")!, "std") : undefined,
    },
    out,
  );
  console.log(`wrote ${out} (${payload.length} bytes, taps ${taps.join(", ")})`);
}

function cmdEmitFixtures(flags: Map<string, string>): void {
  const bankPath = require(flags, "bank");
  const outDir = require(flags, "out-dir");
  const imagePath = flags.get("image");
  const imageSeed = flags.get("image-seed");
  if ((imagePath === undefined) === (imageSeed === undefined)) {
    throw new Error("pass exactly one of --image or --image-seed");
  }
  const image =
    imagePath !== undefined
      ? { path: imagePath }
      : { seed: Number(imageSeed) >>> 0, size: Number(flags.get("image-size") ?? 64) };
  const manifest = emitFixtures(bankPath, outDir, image, basename(bankPath));
  for (const tap of manifest.taps) {
    console.log(
      `wrote ${outDir}/${tap.file} (${tap.channels}x${tap.height}x${tap.width}, margin ${tap.margin})`,
    );
  }
}

function main(): number {
  const [command, ...rest] = process.argv.slice(2);
  try {
    const flags = parseFlags(rest);
    if (command === "export-bank") {
      cmdExportBank(flags);
    } else if (command === "emit-fixtures") {
      cmdEmitFixtures(flags);
    } else {
      console.error("usage: cli.js <export-bank|emit-fixtures> --flag value ...");
      return 2;
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

process.exit(main());
