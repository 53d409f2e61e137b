/** Editing tools: edge brush (draw/erase) and segmentation flood fill.
 *
 * Tools mutate the document in place and return a sparse diff (pixel
 * index, before, after) that the history stack stores for undo/redo.
 * Out-of-canvas geometry is clipped, never an error.
 */

import { PrimitiveDocument } from "./document";
import { PaletteMismatch } from "./types";

export type Tool = "DrawEdge" | "EraseEdge" | "RelabelRegion";

export interface Point {
  x: number;
  y: number;
}

export interface StrokeGeometry {
  /** Polyline for brushes; single seed point for RelabelRegion. */
  points: Point[];
  /** Brush radius in pixels, 1..16. Ignored by RelabelRegion. */
  brushSize?: number;
  /** Target label for RelabelRegion. */
  label?: number;
}

export interface LayerDiff {
  layer: "edge" | "labels";
  indices: Int32Array;
  before: Uint8Array;
  after: Uint8Array;
}

export const MIN_BRUSH = 1;
export const MAX_BRUSH = 16;

function clampBrush(size: number | undefined): number {
  const s = Math.round(size ?? MIN_BRUSH);
  return Math.max(MIN_BRUSH, Math.min(MAX_BRUSH, s));
}

/** Collect the pixel indices under a round brush dragged along a polyline. */
function brushFootprint(doc: PrimitiveDocument, points: Point[], size: number): Set<number> {
  const radius = size / 2;
  const hit = new Set<number>();
  const stamp = (cx: number, cy: number) => {
    const x0 = Math.max(0, Math.floor(cx - radius));
    const x1 = Math.min(doc.width - 1, Math.ceil(cx + radius));
    const y0 = Math.max(0, Math.floor(cy - radius));
    const y1 = Math.min(doc.height - 1, Math.ceil(cy + radius));
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        const dx = x + 0.5 - cx;
        const dy = y + 0.5 - cy;
        if (dx * dx + dy * dy <= radius * radius || size <= 1) {
          if (size <= 1 && (x !== Math.floor(cx) || y !== Math.floor(cy))) continue;
          hit.add(y * doc.width + x);
        }
      }
    }
  };
  for (let i = 0; i < points.length; i++) {
    const a = points[i];
    const b = points[Math.min(i + 1, points.length - 1)];
    const steps = Math.max(1, Math.ceil(Math.hypot(b.x - a.x, b.y - a.y)));
    for (let s = 0; s <= steps; s++) {
      const t = s / steps;
      stamp(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
    }
  }
  return hit;
}

function edgeBrush(doc: PrimitiveDocument, geometry: StrokeGeometry, value: 0 | 1): LayerDiff {
  if (!doc.edge) throw new PaletteMismatch("document has no edge layer");
  const touched = brushFootprint(doc, geometry.points, clampBrush(geometry.brushSize));
  const indices: number[] = [];
  const before: number[] = [];
  for (const idx of touched) {
    if (doc.edge[idx] !== value) {
      indices.push(idx);
      before.push(doc.edge[idx]);
      doc.edge[idx] = value;
    }
  }
  return {
    layer: "edge",
    indices: Int32Array.from(indices),
    before: Uint8Array.from(before),
    after: Uint8Array.from(indices.map(() => value)),
  };
}

/** 4-connected flood fill of the seed's label region to `geometry.label`. */
function relabelRegion(doc: PrimitiveDocument, geometry: StrokeGeometry): LayerDiff {
  if (!doc.labels || !doc.palette) {
    throw new PaletteMismatch("document has no segmentation layer");
  }
  const target = geometry.label;
  if (target === undefined || !doc.palette.labels.some((e) => e.id === target)) {
    throw new PaletteMismatch(`label ${target} not in palette`);
  }
  const seed = geometry.points[0];
  const sx = Math.floor(seed.x);
  const sy = Math.floor(seed.y);
  const empty: LayerDiff = {
    layer: "labels",
    indices: new Int32Array(0),
    before: new Uint8Array(0),
    after: new Uint8Array(0),
  };
  if (sx < 0 || sx >= doc.width || sy < 0 || sy >= doc.height) return empty;

  const source = doc.labels[sy * doc.width + sx];
  if (source === target) return empty;

  const indices: number[] = [];
  const stack: number[] = [sy * doc.width + sx];
  const visited = new Uint8Array(doc.width * doc.height);
  while (stack.length > 0) {
    const idx = stack.pop()!;
    if (visited[idx] || doc.labels[idx] !== source) continue;
    visited[idx] = 1;
    doc.labels[idx] = target;
    indices.push(idx);
    const x = idx % doc.width;
    if (x > 0) stack.push(idx - 1);
    if (x < doc.width - 1) stack.push(idx + 1);
    if (idx >= doc.width) stack.push(idx - doc.width);
    if (idx < doc.width * (doc.height - 1)) stack.push(idx + doc.width);
  }
  return {
    layer: "labels",
    indices: Int32Array.from(indices),
    before: Uint8Array.from(indices.map(() => source)),
    after: Uint8Array.from(indices.map(() => target)),
  };
}

export function applyStroke(
  doc: PrimitiveDocument,
  tool: Tool,
  geometry: StrokeGeometry,
): LayerDiff {
  switch (tool) {
    case "DrawEdge":
      return edgeBrush(doc, geometry, 1);
    case "EraseEdge":
      return edgeBrush(doc, geometry, 0);
    case "RelabelRegion":
      return relabelRegion(doc, geometry);
  }
}

export function revertDiff(doc: PrimitiveDocument, diff: LayerDiff): void {
  const layer = diff.layer === "edge" ? doc.edge : doc.labels;
  if (!layer) return;
  for (let i = 0; i < diff.indices.length; i++) {
    layer[diff.indices[i]] = diff.before[i];
  }
}

export function replayDiff(doc: PrimitiveDocument, diff: LayerDiff): void {
  const layer = diff.layer === "edge" ? doc.edge : doc.labels;
  if (!layer) return;
  for (let i = 0; i < diff.indices.length; i++) {
    layer[diff.indices[i]] = diff.after[i];
  }
}
