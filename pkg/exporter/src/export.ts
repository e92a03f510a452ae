/**
 * Bank assembly and fixture emission.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { type Bank, decodeBank, encodeBank } from "./fbank.js";
import { runBank } from "./forward.js";
import { seededRng, uniformF32 } from "./prng.js";
import { decodeTensor, encodeTensor, type Tensor } from "./rawten.js";
import { stageWeights, type WeightSource } from "./weights.js";
import { IMAGENET_MEAN, IMAGENET_STD, planSlice, receptiveMargins } from "./vgg19.js";

export type ExportSpec = {
  tapNames: string[];
  source: WeightSource;
  mean?: Float32Array;
  std?: Float32Array;
};

export function buildBank(spec: ExportSpec): { bank: Bank; tapNames: string[] } {
  const plan = planSlice(spec.tapNames);
  const stages = plan.stages.map((st) => {
    const { weights, bias } = stageWeights(st, spec.source);
    return {
      inCh: st.inCh,
      outCh: st.outCh,
      k: st.k,
      activation: st.activation,
      pool: st.pool,
      weights,
      bias,
    };
  });
  const bank: Bank = {
    inputChannels: 3,
    mean: spec.mean ?? IMAGENET_MEAN,
    std: spec.std ?? IMAGENET_STD,
    stages,
    taps: plan.taps,
  };
  return { bank, tapNames: plan.tapNames };
}

export function exportBank(spec: ExportSpec, outPath: string): Buffer {
  const { bank } = buildBank(spec);
  const payload = encodeBank(bank);
  mkdirSync(dirname(outPath), { recursive: true });
  writeFileSync(outPath, payload);
  return payload;
}

export function generateFixtureImage(seed: number, size: number): Tensor {
  const rng = seededRng(seed);
  return { c: 3, h: size, w: size, data: uniformF32(rng, 3 * size * size, 0, 1) };
}

export type FixtureManifest = {
  bank: string;
  image: string;
  taps: Array<{
    name: string;
    file: string;
    channels: number;
    height: number;
    width: number;
    margin: number;
  }>;
};

export function emitFixtures(
  bankPath: string,
  outDir: string,
  image: { path: string } | { seed: number; size: number },
  bankFileName: string,
): FixtureManifest {
  mkdirSync(outDir, { recursive: true });
  const bank = decodeBank(readFileSync(bankPath));

  let tensor: Tensor;
  let imageFile: string;
  if ("path" in image) {
    tensor = decodeTensor(readFileSync(image.path));
    imageFile = image.path;
  } else {
    tensor = generateFixtureImage(image.seed, image.size);
    imageFile = "fixture_image.rten";
    writeFileSync(join(outDir, imageFile), encodeTensor(tensor));
  }
  if (tensor.c !== 3) {
    throw new Error(`fixture image must have 3 channels, got ${tensor.c}`);
  }

  const taps = runBank(bank, tensor);
  const margins = receptiveMargins(bank.stages, bank.taps);
  const manifest: FixtureManifest = { bank: bankFileName, image: imageFile, taps: [] };
  taps.forEach((tap, i) => {
    const file = `tap${i}.rten`;
    writeFileSync(join(outDir, file), encodeTensor(tap));
    manifest.taps.push({
      name: `stage${bank.taps[i]}`,
      file,
      channels: tap.c,
      height: tap.h,
      width: tap.w,
      margin: margins[i],
    });
  });
  writeFileSync(join(outDir, "manifest.json"), JSON.stringify(manifest, null, 2) + "\n");
  return manifest;
}
