import { describe, expect, it } from "vitest";

import { cloneDocument, documentsEqual, renderDisplay, validateDocument } from "../src/document";
import { PaletteMismatch } from "../src/types";
import { TEST_PALETTE, makeCombinedDocument } from "./helpers";

describe("document invariants", () => {
  it("accepts a valid combined document", () => {
    expect(() => validateDocument(makeCombinedDocument())).not.toThrow();
  });

  it("rejects non-binary edge bits", () => {
    const doc = makeCombinedDocument();
    doc.edge![5] = 2;
    expect(() => validateDocument(doc)).toThrow(RangeError);
  });

  it("rejects labels outside the palette", () => {
    const doc = makeCombinedDocument();
    doc.labels![0] = 9;
    expect(() => validateDocument(doc)).toThrow(PaletteMismatch);
  });

  it("rejects a document with no layers", () => {
    const doc = makeCombinedDocument();
    doc.edge = null;
    doc.labels = null;
    expect(() => validateDocument(doc)).toThrow(PaletteMismatch);
  });

  it("clone is equal but independent", () => {
    const doc = makeCombinedDocument();
    const copy = cloneDocument(doc);
    expect(documentsEqual(doc, copy)).toBe(true);
    copy.edge![0] = 1;
    expect(documentsEqual(doc, copy)).toBe(false);
    expect(doc.edge![0]).toBe(0);
  });
});

describe("display rendering", () => {
  it("paints palette colors under white edges", () => {
    const doc = makeCombinedDocument();
    const view = renderDisplay(doc);
    // label 0 pixel away from the edge row
    expect([...view.data.slice(0, 3)]).toEqual(TEST_PALETTE.labels[0].color);
    // label 1 pixel on the right half
    const right = (5 * doc.width + 6) * 3;
    expect([...view.data.slice(right, right + 3)]).toEqual(TEST_PALETTE.labels[1].color);
    // edge row is white regardless of the label underneath
    const onEdge = (2 * doc.width + 6) * 3;
    expect([...view.data.slice(onEdge, onEdge + 3)]).toEqual([255, 255, 255]);
  });

  it("edge-only document renders black background with white edges", () => {
    const doc = makeCombinedDocument();
    doc.labels = null;
    doc.palette = null;
    const view = renderDisplay(doc);
    expect([...view.data.slice(0, 3)]).toEqual([0, 0, 0]);
    const onEdge = (2 * doc.width + 1) * 3;
    expect([...view.data.slice(onEdge, onEdge + 3)]).toEqual([255, 255, 255]);
  });
});
