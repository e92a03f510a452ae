/**
 * FBANK1 binary codec (little-endian).
 *
 * Layout: magic "FBANK1\0\0" | u32 input_channels | 3*f32 mean | 3*f32 std
 * | u32 stage_count | u32 tap_count | tap indices (u32 each) | stages.
 * Stage: u32 in | u32 out | u32 k | u8 activation (0 identity, 1 relu) |
 * u8 has_pool | [u32 pool_size, u32 pool_stride] | f32 weights
 * (out, in, kh, kw row-major) | f32 bias (out).
 */

export const FBANK_MAGIC = Buffer.from("FBANK1\0\0", "latin1");

export type BankStage = {
  inCh: number;
  outCh: number;
  k: number;
  activation: "identity" | "relu";
  pool: { size: number; stride: number } | null;
  weights: Float32Array;
  bias: Float32Array;
};

export type Bank = {
  inputChannels: number;
  mean: Float32Array;
  std: Float32Array;
  stages: BankStage[];
  taps: number[];
};

const ACT_CODE = { identity: 0, relu: 1 } as const;
const ACT_NAME: Record<number, "identity" | "relu"> = { 0: "identity", 1: "relu" };

class Writer {
  private chunks: Buffer[] = [];

  u32(v: number): void {
    const b = Buffer.allocUnsafe(4);
    b.writeUInt32LE(v >>> 0);
    this.chunks.push(b);
  }

  u8(v: number): void {
    this.chunks.push(Buffer.from([v & 0xff]));
  }

  f32array(a: Float32Array): void {
    const b = Buffer.allocUnsafe(a.length * 4);
    for (let i = 0; i < a.length; i++) {
      b.writeFloatLE(a[i], i * 4);
    }
    this.chunks.push(b);
  }

  raw(b: Buffer): void {
    this.chunks.push(b);
  }

  done(): Buffer {
    return Buffer.concat(this.chunks);
  }
}

export function encodeBank(bank: Bank): Buffer {
  if (bank.mean.length !== 3 || bank.std.length !== 3) {
    throw new Error("mean/std must have 3 entries");
  }
  const w = new Writer();
  w.raw(FBANK_MAGIC);
  w.u32(bank.inputChannels);
  w.f32array(bank.mean);
  w.f32array(bank.std);
  w.u32(bank.stages.length);
  w.u32(bank.taps.length);
  for (const t of bank.taps) {
    w.u32(t);
  }
  for (const st of bank.stages) {
    if (st.weights.length !== st.outCh * st.inCh * st.k * st.k) {
      throw new Error(`stage weight count ${st.weights.length} mismatches shape`);
    }
    if (st.bias.length !== st.outCh) {
      throw new Error(`stage bias count ${st.bias.length} != ${st.outCh}`);
    }
    w.u32(st.inCh);
    w.u32(st.outCh);
    w.u32(st.k);
    w.u8(ACT_CODE[st.activation]);
    w.u8(st.pool ? 1 : 0);
    if (st.pool) {
      w.u32(st.pool.size);
      w.u32(st.pool.stride);
    }
    w.f32array(st.weights);
    w.f32array(st.bias);
  }
  return w.done();
}

class Reader {
  private pos = 0;

  constructor(private readonly buf: Buffer) {}

  private need(n: number): void {
    if (this.pos + n > this.buf.length) {
      throw new Error("truncated FBANK1 payload");
    }
  }

  u32(): number {
    this.need(4);
    const v = this.buf.readUInt32LE(this.pos);
    this.pos += 4;
    return v;
  }

  u8(): number {
    this.need(1);
    return this.buf[this.pos++];
  }

  f32array(n: number): Float32Array {
    this.need(n * 4);
    const out = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      out[i] = this.buf.readFloatLE(this.pos + i * 4);
    }
    this.pos += n * 4;
    return out;
  }

  raw(n: number): Buffer {
    this.need(n);
    const out = this.buf.subarray(this.pos, this.pos + n);
    this.pos += n;
    return out;
  }

  atEnd(): boolean {
    return this.pos === this.buf.length;
  }
}

export function decodeBank(buf: Buffer): Bank {
  const r = new Reader(buf);
  if (!r.raw(FBANK_MAGIC.length).equals(FBANK_MAGIC)) {
    throw new Error("bad FBANK1 magic");
  }
  const inputChannels = r.u32();
  const mean = r.f32array(3);
  const std = r.f32array(3);
  const stageCount = r.u32();
  const tapCount = r.u32();
  const taps: number[] = [];
  for (let i = 0; i < tapCount; i++) {
    taps.push(r.u32());
  }
  const stages: BankStage[] = [];
  for (let i = 0; i < stageCount; i++) {
    const inCh = r.u32();
    const outCh = r.u32();
    const k = r.u32();
    const act = r.u8();
    if (!(act in ACT_NAME)) {
      throw new Error(`unknown activation code ${act}`);
    }
    const hasPool = r.u8();
    const pool = hasPool ? { size: r.u32(), stride: r.u32() } : null;
    const weights = r.f32array(outCh * inCh * k * k);
    const bias = r.f32array(outCh);
    stages.push({ inCh, outCh, k, activation: ACT_NAME[act], pool, weights, bias });
  }
  if (!r.atEnd()) {
    throw new Error("trailing bytes after last stage");
  }
  return { inputChannels, mean, std, stages, taps };
}
