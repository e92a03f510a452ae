/**
 * Reference forward pass over a decoded bank.
 *
 * This is the expected-value generator for cross-implementation parity
 * fixtures, so it is written as plainly as possible: zero-padded 'same'
 * convolutions (consumers may use a different border convention, which is
 * why fixtures carry interior margins), float64 accumulation, float32
 * stage outputs, valid-region max pooling.
 */

import type { Bank, BankStage } from "./fbank.js";
import type { Tensor } from "./rawten.js";

export function convSame(x: Tensor, st: BankStage): Tensor {
  const { h, w } = x;
  const r = (st.k - 1) / 2;
  const out = new Float32Array(st.outCh * h * w);
  for (let co = 0; co < st.outCh; co++) {
    const wBase = co * st.inCh * st.k * st.k;
    for (let y = 0; y < h; y++) {
      for (let xx = 0; xx < w; xx++) {
        let acc = st.bias[co];
        for (let ci = 0; ci < st.inCh; ci++) {
          const xBase = ci * h * w;
          const wCi = wBase + ci * st.k * st.k;
          for (let ky = 0; ky < st.k; ky++) {
            const sy = y + ky - r;
            if (sy < 0 || sy >= h) {
              continue;
            }
            for (let kx = 0; kx < st.k; kx++) {
              const sx = xx + kx - r;
              if (sx < 0 || sx >= w) {
                continue;
              }
              acc += st.weights[wCi + ky * st.k + kx] * x.data[xBase + sy * w + sx];
            }
          }
        }
        out[co * h * w + y * w + xx] = Math.fround(acc);
      }
    }
  }
  return { c: st.outCh, h, w, data: out };
}

export function relu(x: Tensor): Tensor {
  const data = new Float32Array(x.data.length);
  for (let i = 0; i < data.length; i++) {
    data[i] = x.data[i] > 0 ? x.data[i] : 0;
  }
  return { ...x, data };
}

export function maxPoolValid(x: Tensor, size: number, stride: number): Tensor {
  if (size > x.h || size > x.w) {
    throw new Error(`pool window ${size} exceeds input ${x.h}x${x.w}`);
  }
  const oh = Math.floor((x.h - size) / stride) + 1;
  const ow = Math.floor((x.w - size) / stride) + 1;
  const out = new Float32Array(x.c * oh * ow);
  for (let c = 0; c < x.c; c++) {
    for (let oy = 0; oy < oh; oy++) {
      for (let ox = 0; ox < ow; ox++) {
        let m = -Infinity;
        for (let wy = 0; wy < size; wy++) {
          for (let wx = 0; wx < size; wx++) {
            const v = x.data[c * x.h * x.w + (oy * stride + wy) * x.w + (ox * stride + wx)];
            if (v > m) {
              m = v;
            }
          }
        }
        out[c * oh * ow + oy * ow + ox] = m;
      }
    }
  }
  return { c: x.c, h: oh, w: ow, data: out };
}

export function normalize(x: Tensor, mean: Float32Array, std: Float32Array): Tensor {
  if (x.c !== mean.length) {
    throw new Error(`image has ${x.c} channels, normalization expects ${mean.length}`);
  }
  const data = new Float32Array(x.data.length);
  const plane = x.h * x.w;
  for (let c = 0; c < x.c; c++) {
    for (let i = 0; i < plane; i++) {
      data[c * plane + i] = Math.fround((x.data[c * plane + i] - mean[c]) / std[c]);
    }
  }
  return { ...x, data };
}

/** Run the bank over a 3-channel image; returns the tap tensors. */
export function runBank(bank: Bank, image: Tensor): Tensor[] {
  let x = normalize(image, bank.mean, bank.std);
  const taps: Tensor[] = [];
  const want = new Set(bank.taps);
  for (let i = 0; i < bank.stages.length; i++) {
    const st = bank.stages[i];
    if (x.c !== st.inCh) {
      throw new Error(`stage ${i} expects ${st.inCh} channels, got ${x.c}`);
    }
    x = convSame(x, st);
    if (st.activation === "relu") {
      x = relu(x);
    }
    if (st.pool) {
      x = maxPoolValid(x, st.pool.size, st.pool.stride);
    }
    if (want.has(i)) {
      taps.push(x);
    }
  }
  return taps;
}
