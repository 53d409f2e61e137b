/** End-to-end smoke test against the real inference service.
 *
 * A throwaway checkpoint and an edge primitive are produced with the
 * Python CLIs, the service is started as a child process, and the
 * editor session talks to it over HTTP exactly like the browser would.
 */

import { execFileSync, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { EditorSession } from "../src/session";
import { decodeRgba } from "./helpers";

const PYTHON = process.env.PYTHON ?? "python3";
const PORT = 18000 + Math.floor(Math.random() * 2000);
const SERVICE = `http://127.0.0.1:${PORT}`;

let work: string;
let server: ChildProcess | null = null;

const SETUP_SCRIPT = `
import sys
import numpy as np
from PIL import Image
from pairtrainer.specs import DiscriminatorSpec, GeneratorSpec, LossConfig
from pairtrainer.train import init_state

work = sys.argv[1]
rng = np.random.default_rng(0)
img = np.zeros((64, 64, 3), np.float32)
img[:] = (0.2, 0.3, 0.7)
img[20:44, 20:44] = (0.1, 0.8, 0.3)
img += rng.normal(0.0, 0.01, img.shape)
Image.fromarray(np.clip(np.rint(img * 255), 0, 255).astype(np.uint8)).save(work + "/image.png")

state = init_state(GeneratorSpec(input_channels=1, base_width=8),
                   DiscriminatorSpec(input_channels=4, base_width=8),
                   LossConfig(), seed=0)
state.save(work + "/ckpt.pt")
`;

async function waitForHealth(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const resp = await fetch(`${SERVICE}/health`);
      if (resp.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("inference service never became healthy");
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), "editor-e2e-"));
  execFileSync(PYTHON, ["-c", SETUP_SCRIPT, work]);
  execFileSync(PYTHON, [
    "-m", "warpgen.cli", "extract-edges",
    "--image", join(work, "image.png"),
    "--out", join(work, "edge.png"),
  ]);
  server = spawn(PYTHON, [
    "-m", "pairtrainer.cli", "serve",
    "--ckpt", join(work, "ckpt.pt"),
    "--bind", `127.0.0.1:${PORT}`,
  ], { stdio: "ignore" });
  await waitForHealth();
}, 120000);

afterAll(() => {
  server?.kill();
  rmSync(work, { recursive: true, force: true });
});

function loadSession(): EditorSession {
  return EditorSession.load(
    {
      edge: decodeRgba(readFileSync(join(work, "edge.png"))),
      image: decodeRgba(readFileSync(join(work, "image.png"))),
    },
    SERVICE,
  );
}

describe("editor against the live service", () => {
  it("reports meta for the edge-only model", async () => {
    const session = loadSession();
    const meta = await session.client.getMeta();
    expect(meta.input_channels).toBe(1);
    expect(meta.label_count).toBe(0);
  });

  it("identity-edit submit matches CLI inference byte-for-byte", async () => {
    execFileSync(PYTHON, [
      "-m", "pairtrainer.cli", "infer",
      "--ckpt", join(work, "ckpt.pt"),
      "--primitive", join(work, "edge.png"),
      "--out", join(work, "cli_out.png"),
    ]);
    const session = loadSession();
    const view = await session.submit();
    const cliBytes = readFileSync(join(work, "cli_out.png"));
    expect(Buffer.from(view.imagePng).equals(cliBytes)).toBe(true);
  }, 60000);

  it("draw stroke, submit, and the result panel updates", async () => {
    const session = loadSession();
    const first = await session.submit();
    session.applyStroke("DrawEdge", {
      points: [{ x: 8, y: 8 }, { x: 56, y: 8 }],
      brushSize: 3,
    });
    const second = await session.submit();
    expect(session.result).toBe(second);
    expect(Buffer.from(second.imagePng).equals(Buffer.from(first.imagePng))).toBe(false);
    // the comparison highlight marks pixels that moved away from the original
    const resultRaster = decodeRgba(second.imagePng);
    expect(session.diffAgainstOriginal(resultRaster).length).toBeGreaterThan(0);
  }, 60000);

  it("a dead service leaves the session editable", async () => {
    const session = EditorSession.load(
      {
        edge: decodeRgba(readFileSync(join(work, "edge.png"))),
        image: decodeRgba(readFileSync(join(work, "image.png"))),
      },
      "http://127.0.0.1:1",
    );
    await expect(session.submit()).rejects.toThrow();
    expect(session.lastError).not.toBeNull();
    session.applyStroke("DrawEdge", { points: [{ x: 1, y: 1 }], brushSize: 1 });
    expect(session.history.canUndo()).toBe(true);
  });
});
