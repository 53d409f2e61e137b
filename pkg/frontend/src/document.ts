/** Layered primitive document: a binary edge layer and/or a label grid.
 *
 * The document is the single mutable state the editor operates on; the
 * original photograph is never touched.  Both layers are row-major
 * Uint8Arrays so cloning and diffing stay cheap.
 */

import { Palette, PaletteMismatch, RgbImage, paletteColor } from "./types";

export interface PrimitiveDocument {
  width: number;
  height: number;
  /** 0/1 per pixel, or null when the primitive has no edge layer. */
  edge: Uint8Array | null;
  /** label id per pixel, or null when the primitive has no seg layer. */
  labels: Uint8Array | null;
  palette: Palette | null;
}

export function cloneDocument(doc: PrimitiveDocument): PrimitiveDocument {
  return {
    width: doc.width,
    height: doc.height,
    edge: doc.edge ? new Uint8Array(doc.edge) : null,
    labels: doc.labels ? new Uint8Array(doc.labels) : null,
    palette: doc.palette,
  };
}

export function documentsEqual(a: PrimitiveDocument, b: PrimitiveDocument): boolean {
  if (a.width !== b.width || a.height !== b.height) return false;
  const eq = (x: Uint8Array | null, y: Uint8Array | null) => {
    if (x === null || y === null) return x === y;
    if (x.length !== y.length) return false;
    for (let i = 0; i < x.length; i++) if (x[i] !== y[i]) return false;
    return true;
  };
  return eq(a.edge, b.edge) && eq(a.labels, b.labels);
}

/** Throws when a layer violates the document invariants. */
export function validateDocument(doc: PrimitiveDocument): void {
  const n = doc.width * doc.height;
  if (doc.edge === null && doc.labels === null) {
    throw new PaletteMismatch("document has no layers");
  }
  if (doc.edge) {
    if (doc.edge.length !== n) throw new RangeError("edge layer size mismatch");
    for (let i = 0; i < n; i++) {
      if (doc.edge[i] > 1) throw new RangeError(`edge bit out of range at ${i}`);
    }
  }
  if (doc.labels) {
    if (doc.labels.length !== n) throw new RangeError("seg layer size mismatch");
    if (!doc.palette) throw new PaletteMismatch("seg layer without a palette");
    const known = new Set(doc.palette.labels.map((e) => e.id));
    for (let i = 0; i < n; i++) {
      if (!known.has(doc.labels[i])) {
        throw new PaletteMismatch(`label ${doc.labels[i]} not in palette`);
      }
    }
  }
}

/** Render the document for the canvas: palette colors under white edges. */
export function renderDisplay(doc: PrimitiveDocument): RgbImage {
  const n = doc.width * doc.height;
  const data = new Uint8Array(n * 3);
  if (doc.labels) {
    if (!doc.palette) throw new PaletteMismatch("seg layer without a palette");
    for (let i = 0; i < n; i++) {
      const [r, g, b] = paletteColor(doc.palette, doc.labels[i]);
      data[i * 3] = r;
      data[i * 3 + 1] = g;
      data[i * 3 + 2] = b;
    }
  }
  if (doc.edge) {
    for (let i = 0; i < n; i++) {
      if (doc.edge[i] === 1) {
        data[i * 3] = 255;
        data[i * 3 + 1] = 255;
        data[i * 3 + 2] = 255;
      }
    }
  }
  return { width: doc.width, height: doc.height, data };
}
