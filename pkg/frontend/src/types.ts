/** Shared types and error classes for the primitive editor. */

export interface PaletteEntry {
  id: number;
  color: [number, number, number];
  name?: string;
}

export interface Palette {
  labels: PaletteEntry[];
}

/** Raster image as tightly packed RGB bytes, row-major. */
export interface RgbImage {
  width: number;
  height: number;
  /** length = width * height * 3 */
  data: Uint8Array;
}

export class DecodeError extends Error {}
export class PaletteMismatch extends Error {}
export class ServiceUnreachable extends Error {}
export class ServerError extends Error {}

export function paletteColor(palette: Palette, id: number): [number, number, number] {
  const entry = palette.labels.find((e) => e.id === id);
  if (!entry) {
    throw new PaletteMismatch(`palette missing label id ${id}`);
  }
  return entry.color;
}
