/** Browser wiring: canvases, tool buttons, and the submit flow.
 *
 * Everything testable lives in the other modules; this file only maps
 * DOM events onto the EditorSession API.
 */

import { EditorSession, RgbaRaster } from "./session";
import { Tool } from "./tools";
import { Palette } from "./types";

function rasterFromImage(img: HTMLImageElement): RgbaRaster {
  const canvas = document.createElement("canvas");
  canvas.width = img.naturalWidth;
  canvas.height = img.naturalHeight;
  const ctx = canvas.getContext("2d")!;
  ctx.drawImage(img, 0, 0);
  const data = ctx.getImageData(0, 0, canvas.width, canvas.height);
  return { width: canvas.width, height: canvas.height, data: new Uint8Array(data.data.buffer) };
}

async function loadRaster(file: File): Promise<RgbaRaster> {
  const url = URL.createObjectURL(file);
  try {
    const img = new Image();
    await new Promise((resolve, reject) => {
      img.onload = resolve;
      img.onerror = reject;
      img.src = url;
    });
    return rasterFromImage(img);
  } finally {
    URL.revokeObjectURL(url);
  }
}

function paint(canvas: HTMLCanvasElement, raster: { width: number; height: number; data: Uint8Array }) {
  canvas.width = raster.width;
  canvas.height = raster.height;
  const ctx = canvas.getContext("2d")!;
  const rgba = new Uint8ClampedArray(raster.width * raster.height * 4);
  for (let i = 0; i < raster.width * raster.height; i++) {
    rgba[i * 4] = raster.data[i * 3];
    rgba[i * 4 + 1] = raster.data[i * 3 + 1];
    rgba[i * 4 + 2] = raster.data[i * 3 + 2];
    rgba[i * 4 + 3] = 255;
  }
  ctx.putImageData(new ImageData(rgba, raster.width, raster.height), 0, 0);
}

export function wireUp(root: Document = document): void {
  const editCanvas = root.getElementById("primitiveCanvas") as HTMLCanvasElement;
  const resultImg = root.getElementById("resultImage") as HTMLImageElement;
  const statusEl = root.getElementById("status") as HTMLElement;
  const toolSelect = root.getElementById("tool") as HTMLSelectElement;
  const brushInput = root.getElementById("brushSize") as HTMLInputElement;
  const labelInput = root.getElementById("labelId") as HTMLInputElement;
  const edgeFile = root.getElementById("edgeFile") as HTMLInputElement;
  const segFile = root.getElementById("segFile") as HTMLInputElement;
  const paletteFile = root.getElementById("paletteFile") as HTMLInputElement;
  const imageFile = root.getElementById("imageFile") as HTMLInputElement;
  const serviceInput = root.getElementById("serviceUrl") as HTMLInputElement;
  const loadBtn = root.getElementById("loadBtn") as HTMLButtonElement;
  const submitBtn = root.getElementById("submitBtn") as HTMLButtonElement;
  const undoBtn = root.getElementById("undoBtn") as HTMLButtonElement;
  const redoBtn = root.getElementById("redoBtn") as HTMLButtonElement;

  let session: EditorSession | null = null;
  let strokePoints: { x: number; y: number }[] = [];
  let drawing = false;

  const refresh = () => {
    if (!session) return;
    paint(editCanvas, session.display());
    undoBtn.disabled = !session.history.canUndo();
    redoBtn.disabled = !session.history.canRedo();
  };

  loadBtn.addEventListener("click", async () => {
    try {
      const palette: Palette | undefined = paletteFile.files?.[0]
        ? (JSON.parse(await paletteFile.files[0].text()) as Palette)
        : undefined;
      session = EditorSession.load(
        {
          edge: edgeFile.files?.[0] ? await loadRaster(edgeFile.files[0]) : undefined,
          segmentation: segFile.files?.[0] ? await loadRaster(segFile.files[0]) : undefined,
          palette,
          image: await loadRaster(imageFile.files![0]),
        },
        serviceInput.value,
      );
      statusEl.textContent = "session loaded";
      refresh();
    } catch (e) {
      statusEl.textContent = String(e);
    }
  });

  const canvasPoint = (ev: MouseEvent) => {
    const rect = editCanvas.getBoundingClientRect();
    return {
      x: ((ev.clientX - rect.left) / rect.width) * editCanvas.width,
      y: ((ev.clientY - rect.top) / rect.height) * editCanvas.height,
    };
  };

  editCanvas.addEventListener("mousedown", (ev) => {
    if (!session) return;
    drawing = true;
    strokePoints = [canvasPoint(ev)];
  });
  editCanvas.addEventListener("mousemove", (ev) => {
    if (drawing) strokePoints.push(canvasPoint(ev));
  });
  const finishStroke = () => {
    if (!session || !drawing) return;
    drawing = false;
    session.applyStroke(toolSelect.value as Tool, {
      points: strokePoints,
      brushSize: Number(brushInput.value),
      label: Number(labelInput.value),
    });
    refresh();
  };
  editCanvas.addEventListener("mouseup", finishStroke);
  editCanvas.addEventListener("mouseleave", finishStroke);

  undoBtn.addEventListener("click", () => {
    session?.undo();
    refresh();
  });
  redoBtn.addEventListener("click", () => {
    session?.redo();
    refresh();
  });

  submitBtn.addEventListener("click", async () => {
    if (!session) return;
    statusEl.textContent = "inferring…";
    submitBtn.disabled = true;
    try {
      const view = await session.submit();
      const blob = new Blob([view.imagePng.slice().buffer], { type: "image/png" });
      resultImg.src = URL.createObjectURL(blob);
      statusEl.textContent = "done";
    } catch (e) {
      statusEl.textContent = String(e); // document untouched, keep editing
    } finally {
      submitBtn.disabled = false;
    }
  });
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.addEventListener("DOMContentLoaded", () => wireUp());
}
