/**
 * VGG19 feature-extractor architecture and the lowering of a tap list into
 * a strictly sequential conv/activation/pool stage plan.
 *
 * Tap names follow the usual convention: "reluN_M" taps the output of
 * conv layer N_M after its ReLU, "convN_M" taps it before. Pre-activation
 * taps and pools that directly follow a tapped stage are lowered with
 * synthetic 1x1 identity-conv stages, since the stage format applies
 * activation and pooling after the convolution.
 */

export type ConvDef = { name: string; inCh: number; outCh: number; k: number };
export type LayerDef =
  | ({ kind: "conv" } & ConvDef)
  | { kind: "pool"; size: number; stride: number };

const cfg: Array<number | "M"> = [
  64, 64, "M",
  128, 128, "M",
  256, 256, 256, 256, "M",
  512, 512, 512, 512, "M",
  512, 512, 512, 512, "M",
];

export const VGG19_FEATURES: LayerDef[] = (() => {
  const layers: LayerDef[] = [];
  let inCh = 3;
  let block = 1;
  let idx = 1;
  for (const item of cfg) {
    if (item === "M") {
      layers.push({ kind: "pool", size: 2, stride: 2 });
      block += 1;
      idx = 1;
    } else {
      layers.push({ kind: "conv", name: `conv${block}_${idx}`, inCh, outCh: item, k: 3 });
      inCh = item;
      idx += 1;
    }
  }
  return layers;
})();

/** ImageNet channel statistics, the conventional input normalization. */
export const IMAGENET_MEAN = Float32Array.from([0.485, 0.456, 0.406]);
export const IMAGENET_STD = Float32Array.from([0.229, 0.224, 0.225]);

export type StagePlan = {
  /** Source conv layer name, or null for synthetic identity stages. */
  source: string | null;
  inCh: number;
  outCh: number;
  k: number;
  activation: "identity" | "relu";
  pool: { size: number; stride: number } | null;
};

export type SlicePlan = {
  stages: StagePlan[];
  taps: number[];
  tapNames: string[];
  /** Per tap: interior margin (in tap pixels) outside which differing
   *  border/padding conventions can disagree. */
  margins: number[];
};

function parseTap(name: string): { conv: string; preActivation: boolean } {
  const m = /^(relu|conv)(\d+_\d+)$/.exec(name);
  if (!m) {
    throw new Error(`bad tap name ${name}: expected reluN_M or convN_M`);
  }
  return { conv: `conv${m[2]}`, preActivation: m[1] === "conv" };
}

export function planSlice(tapNames: string[]): SlicePlan {
  if (tapNames.length === 0) {
    throw new Error("at least one tap is required");
  }
  const wanted = tapNames.map(parseTap);
  const convNames = new Set(
    VGG19_FEATURES.filter((l) => l.kind === "conv").map((l) => (l as ConvDef & { kind: "conv" }).name),
  );
  for (const t of wanted) {
    if (!convNames.has(t.conv)) {
      throw new Error(`tap ${t.conv} does not exist in VGG19`);
    }
  }
  const order = VGG19_FEATURES.filter((l) => l.kind === "conv").map(
    (l) => (l as ConvDef & { kind: "conv" }).name,
  );
  const depth = new Map(order.map((n, i) => [n, i]));
  const sorted = [...wanted].sort((a, b) => depth.get(a.conv)! - depth.get(b.conv)!);
  for (let i = 1; i < sorted.length; i++) {
    if (sorted[i].conv === sorted[i - 1].conv) {
      throw new Error(`duplicate tap at ${sorted[i].conv}`);
    }
  }
  const lastConv = sorted[sorted.length - 1].conv;
  const byConv = new Map(sorted.map((t) => [t.conv, t]));

  const stages: StagePlan[] = [];
  const taps: number[] = [];
  const tapNamesOut: string[] = [];
  for (const layer of VGG19_FEATURES) {
    if (layer.kind === "conv") {
      const tap = byConv.get(layer.name);
      stages.push({
        source: layer.name,
        inCh: layer.inCh,
        outCh: layer.outCh,
        k: layer.k,
        activation: tap?.preActivation ? "identity" : "relu",
        pool: null,
      });
      if (tap) {
        taps.push(stages.length - 1);
        tapNamesOut.push((tap.preActivation ? "conv" : "relu") + layer.name.slice(4));
        if (tap.preActivation) {
          // restore the ReLU the real network applies after this conv
          stages.push({
            source: null,
            inCh: layer.outCh,
            outCh: layer.outCh,
            k: 1,
            activation: "relu",
            pool: null,
          });
        }
      }
      if (layer.name === lastConv) {
        break;
      }
    } else {
      const prev = stages[stages.length - 1];
      if (prev !== undefined && !taps.includes(stages.length - 1) && prev.pool === null) {
        prev.pool = { size: layer.size, stride: layer.stride };
      } else {
        stages.push({
          source: null,
          inCh: prev.outCh,
          outCh: prev.outCh,
          k: 1,
          activation: "identity",
          pool: { size: layer.size, stride: layer.stride },
        });
      }
    }
  }

  // drop any synthetic trailer after the last tap
  while (stages.length - 1 > taps[taps.length - 1]) {
    stages.pop();
  }

  return { stages, taps, tapNames: tapNamesOut, margins: receptiveMargins(stages, taps) };
}

/**
 * Receptive-field margin per tap, in tap pixels. Tracks the radius R (in
 * input pixels) that border conventions can influence and the cumulative
 * stride S; the margin is ceil(R / S) plus one pixel of slack.
 */
export function receptiveMargins(
  stages: Array<{ k: number; pool: { size: number; stride: number } | null }>,
  taps: number[],
): number[] {
  const margins: number[] = [];
  let radius = 0;
  let stride = 1;
  for (let i = 0; i < stages.length; i++) {
    const st = stages[i];
    radius += ((st.k - 1) / 2) * stride;
    if (st.pool) {
      radius += (st.pool.size - 1) * stride;
      stride *= st.pool.stride;
    }
    if (taps.includes(i)) {
      margins.push(Math.ceil(radius / stride) + 1);
    }
  }
  return margins;
}
