import { PNG } from "pngjs";

import { PrimitiveDocument } from "../src/document";
import { RgbaRaster } from "../src/session";
import { Palette } from "../src/types";

export const TEST_PALETTE: Palette = {
  labels: [
    { id: 0, color: [200, 30, 30], name: "background" },
    { id: 1, color: [30, 200, 30], name: "foreground" },
  ],
};

export function decodeRgba(png: Uint8Array): RgbaRaster {
  const img = PNG.sync.read(Buffer.from(png));
  return { width: img.width, height: img.height, data: new Uint8Array(img.data) };
}

export function solidRaster(width: number, height: number, rgb: [number, number, number]): RgbaRaster {
  const data = new Uint8Array(width * height * 4);
  for (let i = 0; i < width * height; i++) {
    data.set([...rgb, 255], i * 4);
  }
  return { width, height, data };
}

/** 8x8 document with both layers: left half label 0, right half label 1,
 * a horizontal edge line on row 2. */
export function makeCombinedDocument(): PrimitiveDocument {
  const width = 8;
  const height = 8;
  const edge = new Uint8Array(width * height);
  for (let x = 0; x < width; x++) edge[2 * width + x] = 1;
  const labels = new Uint8Array(width * height);
  for (let y = 0; y < height; y++) {
    for (let x = width / 2; x < width; x++) labels[y * width + x] = 1;
  }
  return { width, height, edge, labels, palette: TEST_PALETTE };
}

export function rasterFromLabels(doc: PrimitiveDocument): RgbaRaster {
  const { width, height } = doc;
  const data = new Uint8Array(width * height * 4);
  for (let i = 0; i < width * height; i++) {
    const entry = TEST_PALETTE.labels.find((e) => e.id === doc.labels![i])!;
    data.set([...entry.color, 255], i * 4);
  }
  return { width, height, data };
}

export function rasterFromEdge(doc: PrimitiveDocument): RgbaRaster {
  const { width, height } = doc;
  const data = new Uint8Array(width * height * 4);
  for (let i = 0; i < width * height; i++) {
    const v = doc.edge![i] ? 255 : 0;
    data.set([v, v, v, 255], i * 4);
  }
  return { width, height, data };
}
