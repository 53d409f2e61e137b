import { describe, expect, it } from "vitest";

import { encodeEdgePng, encodeIndexedPng } from "../src/png";
import { EditorSession } from "../src/session";
import { TEST_PALETTE, decodeRgba, makeCombinedDocument, rasterFromEdge, solidRaster } from "./helpers";

describe("png export", () => {
  it("edge layer round-trips through the 1-bit PNG", () => {
    const doc = makeCombinedDocument();
    const png = encodeEdgePng(doc.edge!, doc.width, doc.height);
    const back = decodeRgba(png);
    expect(back.width).toBe(doc.width);
    expect(back.height).toBe(doc.height);
    for (let i = 0; i < doc.width * doc.height; i++) {
      expect(back.data[i * 4] > 127 ? 1 : 0).toBe(doc.edge![i]);
    }
  });

  it("seg layer round-trips through the indexed PNG and palette", () => {
    const doc = makeCombinedDocument();
    const png = encodeIndexedPng(doc.labels!, doc.width, doc.height, TEST_PALETTE);
    const back = decodeRgba(png);
    for (let i = 0; i < doc.width * doc.height; i++) {
      const rgb: [number, number, number] = [
        back.data[i * 4],
        back.data[i * 4 + 1],
        back.data[i * 4 + 2],
      ];
      expect(rgb).toEqual(TEST_PALETTE.labels[doc.labels![i]].color);
    }
  });

  it("odd widths pack 1-bit rows correctly", () => {
    const width = 11;
    const height = 3;
    const edge = new Uint8Array(width * height);
    for (let i = 0; i < edge.length; i += 3) edge[i] = 1;
    const back = decodeRgba(encodeEdgePng(edge, width, height));
    for (let i = 0; i < edge.length; i++) {
      expect(back.data[i * 4] > 127 ? 1 : 0).toBe(edge[i]);
    }
  });
});

describe("session round-trip", () => {
  it("export then re-import reproduces the document exactly", () => {
    const doc = makeCombinedDocument();
    const image = solidRaster(doc.width, doc.height, [10, 20, 30]);
    const session = EditorSession.load(
      {
        edge: rasterFromEdge(doc),
        segmentation: decodeRgba(encodeIndexedPng(doc.labels!, doc.width, doc.height, TEST_PALETTE)),
        palette: TEST_PALETTE,
        image,
      },
      "http://localhost:0",
    );
    session.applyStroke("DrawEdge", { points: [{ x: 2, y: 6 }], brushSize: 3 });
    session.applyStroke("RelabelRegion", { points: [{ x: 1, y: 0 }], label: 1 });

    const exported = session.exportLayers();
    const reimported = EditorSession.load(
      {
        edge: decodeRgba(encodeEdgePng(exported.edge!, doc.width, doc.height)),
        segmentation: decodeRgba(
          encodeIndexedPng(exported.labels!, doc.width, doc.height, exported.palette!),
        ),
        palette: exported.palette,
        image,
      },
      "http://localhost:0",
    );
    expect(reimported.isPristine(session.document)).toBe(true);
  });
});
