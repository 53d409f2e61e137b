/** Minimal PNG encoding for the two layer export formats:
 *
 *  - edge layer: 1-bit grayscale PNG
 *  - seg layer: 8-bit indexed-color PNG (PLTE from the session palette)
 *
 * Encoding is dependency-free: IDAT uses stored (uncompressed) deflate
 * blocks so the same code runs in the browser and under node without a
 * zlib binding.  Decoding in tests goes through pngjs instead.
 */

import { Palette } from "./types";

const SIGNATURE = Uint8Array.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < bytes.length; i++) {
    c = CRC_TABLE[(c ^ bytes[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function adler32(bytes: Uint8Array): number {
  let a = 1;
  let b = 0;
  for (let i = 0; i < bytes.length; i++) {
    a = (a + bytes[i]) % 65521;
    b = (b + a) % 65521;
  }
  return ((b << 16) | a) >>> 0;
}

function chunk(type: string, body: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + body.length);
  const view = new DataView(out.buffer);
  view.setUint32(0, body.length);
  for (let i = 0; i < 4; i++) out[4 + i] = type.charCodeAt(i);
  out.set(body, 8);
  view.setUint32(8 + body.length, crc32(out.subarray(4, 8 + body.length)));
  return out;
}

/** zlib stream made of stored deflate blocks (BTYPE=00). */
function storedZlib(raw: Uint8Array): Uint8Array {
  const MAX_BLOCK = 65535;
  const blocks = Math.max(1, Math.ceil(raw.length / MAX_BLOCK));
  const out = new Uint8Array(2 + raw.length + blocks * 5 + 4);
  out[0] = 0x78; // CM=8, CINFO=7
  out[1] = 0x01; // FCHECK making the header a multiple of 31
  let pos = 2;
  for (let b = 0; b < blocks; b++) {
    const start = b * MAX_BLOCK;
    const len = Math.min(MAX_BLOCK, raw.length - start);
    out[pos++] = b === blocks - 1 ? 1 : 0; // BFINAL
    out[pos++] = len & 0xff;
    out[pos++] = len >> 8;
    out[pos++] = ~len & 0xff;
    out[pos++] = (~len >> 8) & 0xff;
    out.set(raw.subarray(start, start + len), pos);
    pos += len;
  }
  new DataView(out.buffer).setUint32(pos, adler32(raw));
  return out.subarray(0, pos + 4);
}

function ihdr(width: number, height: number, bitDepth: number, colorType: number): Uint8Array {
  const body = new Uint8Array(13);
  const view = new DataView(body.buffer);
  view.setUint32(0, width);
  view.setUint32(4, height);
  body[8] = bitDepth;
  body[9] = colorType;
  return chunk("IHDR", body);
}

function concat(parts: Uint8Array[]): Uint8Array {
  const out = new Uint8Array(parts.reduce((n, p) => n + p.length, 0));
  let pos = 0;
  for (const p of parts) {
    out.set(p, pos);
    pos += p.length;
  }
  return out;
}

/** Encode a 0/1 bitmap as a 1-bit grayscale PNG (1 = white). */
export function encodeEdgePng(edge: Uint8Array, width: number, height: number): Uint8Array {
  const rowBytes = Math.ceil(width / 8);
  const raw = new Uint8Array(height * (rowBytes + 1));
  for (let y = 0; y < height; y++) {
    const row = y * (rowBytes + 1);
    raw[row] = 0; // filter: None
    for (let x = 0; x < width; x++) {
      if (edge[y * width + x]) {
        raw[row + 1 + (x >> 3)] |= 0x80 >> (x & 7);
      }
    }
  }
  return concat([
    SIGNATURE,
    ihdr(width, height, 1, 0),
    chunk("IDAT", storedZlib(raw)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

/** Encode a label grid as an 8-bit indexed-color PNG. */
export function encodeIndexedPng(
  labels: Uint8Array,
  width: number,
  height: number,
  palette: Palette,
): Uint8Array {
  const ids = [...palette.labels].sort((a, b) => a.id - b.id);
  const plte = new Uint8Array((Math.max(...ids.map((e) => e.id)) + 1) * 3);
  for (const entry of ids) {
    plte.set(entry.color, entry.id * 3);
  }
  const raw = new Uint8Array(height * (width + 1));
  for (let y = 0; y < height; y++) {
    raw[y * (width + 1)] = 0; // filter: None
    raw.set(labels.subarray(y * width, (y + 1) * width), y * (width + 1) + 1);
  }
  return concat([
    SIGNATURE,
    ihdr(width, height, 8, 3),
    chunk("PLTE", plte),
    chunk("IDAT", storedZlib(raw)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}
