/**
 * Weight sources for the sliced stages.
 *
 * - DirWeightSource reads raw little-endian float32 blobs for each conv
 *   layer from a directory with a manifest.json, for locally available
 *   pretrained weights.
 * - SyntheticWeightSource generates deterministic He-scaled uniform
 *   weights from a seed, used for parity fixtures when no pretrained
 *   weights are present.
 *
 * Synthetic identity stages (from the slicing lowering) always get exact
 * identity kernels regardless of the source.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import { seededRng, uniformF32 } from "./prng.js";
import type { StagePlan } from "./vgg19.js";

export interface WeightSource {
  /** (out, in, k, k) row-major kernel for a named conv layer. */
  kernel(name: string, outCh: number, inCh: number, k: number): Float32Array;
  bias(name: string, outCh: number): Float32Array;
}

export class SyntheticWeightSource implements WeightSource {
  constructor(private readonly seed: number) {}

  kernel(name: string, outCh: number, inCh: number, k: number): Float32Array {
    const rng = seededRng(this.seed ^ hashName(name));
    const fanIn = inCh * k * k;
    const bound = Math.sqrt(6.0 / fanIn);
    return uniformF32(rng, outCh * inCh * k * k, -bound, bound);
  }

  bias(name: string, outCh: number): Float32Array {
    const rng = seededRng((this.seed ^ hashName(name)) + 0x5bd1);
    return uniformF32(rng, outCh, -0.05, 0.05);
  }
}

function hashName(name: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < name.length; i++) {
    h = Math.imul(h ^ name.charCodeAt(i), 0x01000193);
  }
  return h >>> 0;
}

type DirManifest = {
  layers: Record<string, { weights: string; bias: string }>;
};

export class DirWeightSource implements WeightSource {
  private readonly manifest: DirManifest;

  constructor(private readonly root: string) {
    this.manifest = JSON.parse(readFileSync(join(root, "manifest.json"), "utf-8"));
    if (!this.manifest.layers) {
      throw new Error(`${root}/manifest.json has no "layers" table`);
    }
  }

  private blob(file: string, expected: number, what: string): Float32Array {
    const raw = readFileSync(join(this.root, file));
    if (raw.byteLength !== expected * 4) {
      throw new Error(
        `${what} blob ${file}: ${raw.byteLength} bytes, expected ${expected * 4}`,
      );
    }
    const out = new Float32Array(expected);
    for (let i = 0; i < expected; i++) {
      out[i] = raw.readFloatLE(i * 4);
    }
    return out;
  }

  private entry(name: string): { weights: string; bias: string } {
    const e = this.manifest.layers[name];
    if (!e) {
      throw new Error(`weights directory has no entry for layer ${name}`);
    }
    return e;
  }

  kernel(name: string, outCh: number, inCh: number, k: number): Float32Array {
    return this.blob(this.entry(name).weights, outCh * inCh * k * k, `${name} kernel`);
  }

  bias(name: string, outCh: number): Float32Array {
    return this.blob(this.entry(name).bias, outCh, `${name} bias`);
  }
}

export function identityKernel(channels: number): Float32Array {
  const out = new Float32Array(channels * channels);
  for (let c = 0; c < channels; c++) {
    out[c * channels + c] = 1.0;
  }
  return out;
}

export function stageWeights(
  stage: StagePlan,
  source: WeightSource,
): { weights: Float32Array; bias: Float32Array } {
  if (stage.source === null) {
    if (stage.k !== 1 || stage.inCh !== stage.outCh) {
      throw new Error("synthetic stages must be 1x1 identity convs");
    }
    return {
      weights: identityKernel(stage.inCh),
      bias: new Float32Array(stage.outCh),
    };
  }
  return {
    weights: source.kernel(stage.source, stage.outCh, stage.inCh, stage.k),
    bias: source.bias(stage.source, stage.outCh),
  };
}
