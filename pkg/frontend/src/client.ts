/** HTTP client for the inference service (/meta and /infer). */

import { Palette, ServerError, ServiceUnreachable } from "./types";
import { encodeEdgePng, encodeIndexedPng } from "./png";

export interface ServiceMeta {
  input_channels: number;
  label_count: number;
  iteration: number;
}

export interface InferPayload {
  edge?: { data: Uint8Array; width: number; height: number };
  labels?: { data: Uint8Array; width: number; height: number };
  palette?: Palette;
}

export class InferenceClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async getMeta(): Promise<ServiceMeta> {
    let resp: Response;
    try {
      resp = await this.fetchFn(`${this.baseUrl}/meta`);
    } catch (e) {
      throw new ServiceUnreachable(`cannot reach ${this.baseUrl}: ${e}`);
    }
    if (!resp.ok) {
      throw new ServerError(`/meta returned ${resp.status}`);
    }
    return (await resp.json()) as ServiceMeta;
  }

  /** POST the primitive layers; resolves to the returned PNG bytes. */
  async infer(payload: InferPayload): Promise<Uint8Array> {
    const form = new FormData();
    if (payload.edge) {
      const png = encodeEdgePng(payload.edge.data, payload.edge.width, payload.edge.height);
      form.append("edge", new Blob([png.slice().buffer], { type: "image/png" }), "edge.png");
    }
    if (payload.labels) {
      if (!payload.palette) {
        throw new ServerError("segmentation layer needs a palette");
      }
      const png = encodeIndexedPng(
        payload.labels.data,
        payload.labels.width,
        payload.labels.height,
        payload.palette,
      );
      form.append("segmentation", new Blob([png.slice().buffer], { type: "image/png" }), "seg.png");
      form.append(
        "palette",
        new Blob([JSON.stringify(payload.palette)], { type: "application/json" }),
        "palette.json",
      );
    }
    let resp: Response;
    try {
      resp = await this.fetchFn(`${this.baseUrl}/infer`, { method: "POST", body: form });
    } catch (e) {
      throw new ServiceUnreachable(`cannot reach ${this.baseUrl}: ${e}`);
    }
    if (!resp.ok) {
      let message = `/infer returned ${resp.status}`;
      try {
        const doc = (await resp.json()) as { error?: string };
        if (doc.error) message = doc.error;
      } catch {
        /* non-JSON error body; keep the status message */
      }
      throw new ServerError(message);
    }
    return new Uint8Array(await resp.arrayBuffer());
  }
}
