/**
 * RAWTEN tensor codec: magic "RTEN1\0\0\0" | u32 c | u32 h | u32 w |
 * little-endian float32 payload (channel-major, row-major).
 */

export const RAWTEN_MAGIC = Buffer.from("RTEN1\0\0\0", "latin1");

export type Tensor = { c: number; h: number; w: number; data: Float32Array };

export function encodeTensor(t: Tensor): Buffer {
  if (t.data.length !== t.c * t.h * t.w) {
    throw new Error(`tensor data length ${t.data.length} mismatches ${t.c}x${t.h}x${t.w}`);
  }
  const out = Buffer.allocUnsafe(20 + t.data.length * 4);
  RAWTEN_MAGIC.copy(out, 0);
  out.writeUInt32LE(t.c, 8);
  out.writeUInt32LE(t.h, 12);
  out.writeUInt32LE(t.w, 16);
  for (let i = 0; i < t.data.length; i++) {
    out.writeFloatLE(t.data[i], 20 + i * 4);
  }
  return out;
}

export function decodeTensor(buf: Buffer): Tensor {
  if (buf.length < 20 || !buf.subarray(0, 8).equals(RAWTEN_MAGIC)) {
    throw new Error("bad RAWTEN payload");
  }
  const c = buf.readUInt32LE(8);
  const h = buf.readUInt32LE(12);
  const w = buf.readUInt32LE(16);
  const n = c * h * w;
  if (buf.length !== 20 + n * 4) {
    throw new Error(`RAWTEN payload is ${buf.length} bytes, expected ${20 + n * 4}`);
  }
  const data = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    data[i] = buf.readFloatLE(20 + i * 4);
  }
  return { c, h, w, data };
}
