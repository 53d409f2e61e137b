"""Inference HTTP service backing the primitive editor.

POST /infer  multipart form: `edge` (PNG, required when the model consumes
             an edge channel), `segmentation` (indexed PNG) + `palette`
             (JSON) when the model consumes label channels -> PNG image
GET  /meta   {"input_channels", "label_count", "height", "width"}
GET  /health "ok"
"""

from __future__ import annotations

import io
import json

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from PIL import Image

from pairtrainer.models import ChannelMismatch
from pairtrainer.train import TrainState, infer


def build_app(state: TrainState, meta_extra: dict | None = None) -> FastAPI:
    app = FastAPI()
    d_p = state.gen_spec.input_channels

    @app.get("/health")
    def health():
        return PlainTextResponse("ok")

    @app.get("/meta")
    def meta():
        doc = {"input_channels": d_p,
               "label_count": d_p - 1 if d_p > 1 else 0,
               "iteration": state.iteration}
        doc.update(meta_extra or {})
        return JSONResponse(doc)

    @app.post("/infer")
    async def run_infer(request: Request):
        form = await request.form()
        parts = []
        try:
            if "segmentation" in form:
                seg_bytes = await form["segmentation"].read()
                labels = np.asarray(Image.open(io.BytesIO(seg_bytes)),
                                    dtype=np.int64)
                if "palette" in form:
                    pal = json.loads((await form["palette"].read()).decode())
                    n = len(pal["labels"])
                else:
                    n = d_p - 1
                onehot = np.zeros((*labels.shape, n), dtype=np.float32)
                rows, cols = np.mgrid[0:labels.shape[0], 0:labels.shape[1]]
                onehot[rows, cols, np.clip(labels, 0, n - 1)] = 1.0
                parts.append(onehot)
            if "edge" in form:
                edge_bytes = await form["edge"].read()
                arr = np.asarray(Image.open(io.BytesIO(edge_bytes)).convert("L"),
                                 dtype=np.float32)
                parts.append((arr > 127).astype(np.float32)[:, :, None])
            if not parts:
                return JSONResponse({"error": "no primitive layers in request"},
                                    status_code=400)
            shapes = {p.shape[:2] for p in parts}
            if len(shapes) != 1:
                return JSONResponse({"error": f"layer size mismatch: {shapes}"},
                                    status_code=400)
            prim = np.concatenate(parts, axis=2)
            out = infer(state, prim)
        except ChannelMismatch as e:
            return JSONResponse({"error": str(e)}, status_code=400)
        except Exception as e:
            return JSONResponse({"error": f"bad primitive payload: {e}"},
                                status_code=400)
        buf = io.BytesIO()
        Image.fromarray(
            np.clip(np.rint(out * 255.0), 0, 255).astype(np.uint8)
        ).save(buf, format="PNG")
        return Response(buf.getvalue(), media_type="image/png")

    return app


def serve(state: TrainState, bind_address: str = "127.0.0.1:8792"):
    import uvicorn

    host, _, port = bind_address.partition(":")
    uvicorn.run(build_app(state), host=host, port=int(port or 8792),
                log_level="warning")
