/** Editor session: the layered document, its history, and the service
 * connection.  Strokes edit only the primitive layers; the original
 * photograph is read-only reference material for the comparison panel.
 */

import { InferenceClient, ServiceMeta } from "./client";
import {
  PrimitiveDocument,
  cloneDocument,
  documentsEqual,
  renderDisplay,
  validateDocument,
} from "./document";
import { History } from "./history";
import { StrokeGeometry, Tool, applyStroke } from "./tools";
import { DecodeError, Palette, PaletteMismatch, RgbImage } from "./types";

/** Decoded raster as RGBA bytes; the browser gets this from a canvas,
 * tests from pngjs. */
export interface RgbaRaster {
  width: number;
  height: number;
  data: Uint8Array;
}

export interface SessionFiles {
  edge?: RgbaRaster;
  segmentation?: RgbaRaster;
  palette?: Palette;
  image: RgbaRaster;
}

export interface ResultView {
  /** PNG bytes returned by the service. */
  imagePng: Uint8Array;
  /** Pixel indices where the result differs from the original image. */
  changedPixels?: Int32Array;
}

function rasterToEdge(raster: RgbaRaster): Uint8Array {
  const n = raster.width * raster.height;
  const edge = new Uint8Array(n);
  for (let i = 0; i < n; i++) {
    edge[i] = raster.data[i * 4] > 127 ? 1 : 0;
  }
  return edge;
}

function rasterToLabels(raster: RgbaRaster, palette: Palette): Uint8Array {
  const byColor = new Map<number, number>();
  for (const entry of palette.labels) {
    const [r, g, b] = entry.color;
    byColor.set((r << 16) | (g << 8) | b, entry.id);
  }
  const n = raster.width * raster.height;
  const labels = new Uint8Array(n);
  for (let i = 0; i < n; i++) {
    const key =
      (raster.data[i * 4] << 16) | (raster.data[i * 4 + 1] << 8) | raster.data[i * 4 + 2];
    const id = byColor.get(key);
    if (id === undefined) {
      throw new PaletteMismatch(
        `pixel ${i} has color #${key.toString(16).padStart(6, "0")} not in palette`,
      );
    }
    labels[i] = id;
  }
  return labels;
}

export class EditorSession {
  readonly document: PrimitiveDocument;
  readonly originalImage: RgbImage;
  readonly history = new History();
  readonly client: InferenceClient;
  result: ResultView | null = null;
  lastError: string | null = null;
  private inFlight: Promise<ResultView> | null = null;

  private constructor(doc: PrimitiveDocument, image: RgbImage, client: InferenceClient) {
    this.document = doc;
    this.originalImage = image;
    this.client = client;
  }

  static load(files: SessionFiles, serviceUrl: string, meta?: ServiceMeta): EditorSession {
    if (!files.edge && !files.segmentation) {
      throw new DecodeError("no primitive layers to load");
    }
    const base = files.edge ?? files.segmentation!;
    const { width, height } = base;
    for (const raster of [files.edge, files.segmentation, files.image]) {
      if (raster && (raster.width !== width || raster.height !== height)) {
        throw new DecodeError("layer and image sizes disagree");
      }
    }
    if (files.segmentation && !files.palette) {
      throw new PaletteMismatch("segmentation layer needs a palette");
    }
    const doc: PrimitiveDocument = {
      width,
      height,
      edge: files.edge ? rasterToEdge(files.edge) : null,
      labels: files.segmentation ? rasterToLabels(files.segmentation, files.palette!) : null,
      palette: files.palette ?? null,
    };
    validateDocument(doc);
    if (meta) {
      const channels = (doc.labels ? meta.label_count : 0) + (doc.edge ? 1 : 0);
      if (doc.labels && meta.label_count !== files.palette!.labels.length) {
        throw new PaletteMismatch(
          `service expects ${meta.label_count} labels, palette has ${files.palette!.labels.length}`,
        );
      }
      if (channels !== meta.input_channels) {
        throw new PaletteMismatch(
          `layer channels (${channels}) do not match service input (${meta.input_channels})`,
        );
      }
    }
    const image: RgbImage = {
      width: files.image.width,
      height: files.image.height,
      data: rgbaToRgb(files.image),
    };
    return new EditorSession(doc, image, new InferenceClient(serviceUrl));
  }

  applyStroke(tool: Tool, geometry: StrokeGeometry): void {
    const diff = applyStroke(this.document, tool, geometry);
    this.history.push(diff);
  }

  undo(): boolean {
    return this.history.undo(this.document);
  }

  redo(): boolean {
    return this.history.redo(this.document);
  }

  /** Current document rendered with the shared display convention. */
  display(): RgbImage {
    return renderDisplay(this.document);
  }

  /** Export the layers in the on-disk primitive formats. */
  exportLayers(): { edge?: Uint8Array; labels?: Uint8Array; palette?: Palette } {
    const doc = cloneDocument(this.document);
    return {
      edge: doc.edge ?? undefined,
      labels: doc.labels ?? undefined,
      palette: doc.palette ?? undefined,
    };
  }

  isPristine(other: PrimitiveDocument): boolean {
    return documentsEqual(this.document, other);
  }

  /** Send the current layers to the service.  The document snapshot is
   * taken synchronously, so edits made while the request is in flight
   * do not leak into it; a failed request leaves the session unchanged
   * apart from `lastError`. */
  async submit(): Promise<ResultView> {
    if (this.inFlight) return this.inFlight;
    const snapshot = cloneDocument(this.document);
    this.inFlight = (async () => {
      try {
        const png = await this.client.infer({
          edge: snapshot.edge
            ? { data: snapshot.edge, width: snapshot.width, height: snapshot.height }
            : undefined,
          labels: snapshot.labels
            ? { data: snapshot.labels, width: snapshot.width, height: snapshot.height }
            : undefined,
          palette: snapshot.palette ?? undefined,
        });
        const view: ResultView = { imagePng: png };
        this.result = view;
        this.lastError = null;
        return view;
      } catch (e) {
        this.lastError = e instanceof Error ? e.message : String(e);
        throw e;
      } finally {
        this.inFlight = null;
      }
    })();
    return this.inFlight;
  }

  /** Mark pixels where a decoded result differs from the original. */
  diffAgainstOriginal(result: RgbaRaster): Int32Array {
    const changed: number[] = [];
    const n = this.originalImage.width * this.originalImage.height;
    for (let i = 0; i < n; i++) {
      if (
        result.data[i * 4] !== this.originalImage.data[i * 3] ||
        result.data[i * 4 + 1] !== this.originalImage.data[i * 3 + 1] ||
        result.data[i * 4 + 2] !== this.originalImage.data[i * 3 + 2]
      ) {
        changed.push(i);
      }
    }
    return Int32Array.from(changed);
  }
}

function rgbaToRgb(raster: RgbaRaster): Uint8Array {
  const n = raster.width * raster.height;
  const rgb = new Uint8Array(n * 3);
  for (let i = 0; i < n; i++) {
    rgb[i * 3] = raster.data[i * 4];
    rgb[i * 3 + 1] = raster.data[i * 4 + 1];
    rgb[i * 3 + 2] = raster.data[i * 4 + 2];
  }
  return rgb;
}
