"""HTTP service exposing a manifest's samples and fresh augmentation draws.

All served state is immutable after startup; responses for a given query
are byte-identical across runs and across independently started server
processes (deterministic zip serialization, fixed timestamps).
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from warpgen.augmentor import (
    SampleManifest,
    fresh_sample,
    get_sample,
    pair_to_zip,
)
from warpgen.core import ImagePair


class BindError(Exception):
    pass


class _State:
    def __init__(self, manifest: SampleManifest):
        self.manifest = manifest
        self.config = manifest.config
        self.palette = manifest.palette
        self.source = manifest.source_pair()


def _make_handler(state: _State):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # quiet
            pass

        def _send(self, code: int, body: bytes, ctype: str):
            self.send_response(code)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _error(self, code: int, message: str):
            body = json.dumps({"error": message}).encode()
            self._send(code, body, "application/json")

        def do_GET(self):
            url = urlparse(self.path)
            query = parse_qs(url.query)
            try:
                if url.path == "/health":
                    self._send(200, b"ok", "text/plain")
                elif url.path == "/config":
                    body = json.dumps(state.config.to_dict(),
                                      sort_keys=True).encode()
                    self._send(200, body, "application/json")
                elif url.path == "/sample":
                    if "index" not in query:
                        return self._error(400, "missing index")
                    try:
                        index = int(query["index"][0])
                    except ValueError:
                        return self._error(400, "index must be an integer")
                    if not (0 <= index < state.manifest.n):
                        return self._error(400, f"index out of range [0, {state.manifest.n})")
                    pair = get_sample(state.manifest, index, source=state.source)
                    self._send(200, pair_to_zip(pair, state.palette),
                               "application/zip")
                elif url.path == "/fresh":
                    if "seed" not in query:
                        return self._error(400, "missing seed")
                    try:
                        seed = int(query["seed"][0])
                    except ValueError:
                        return self._error(400, "seed must be an integer")
                    pair = fresh_sample(state.source, state.config, seed,
                                        state.palette)
                    self._send(200, pair_to_zip(pair, state.palette),
                               "application/zip")
                else:
                    self._error(404, f"unknown path {url.path}")
            except BrokenPipeError:
                pass
            except Exception as e:  # malformed inputs -> 400, not a crash
                self._error(400, str(e))

    return Handler


def make_server(manifest: SampleManifest, host: str, port: int) -> ThreadingHTTPServer:
    state = _State(manifest)
    try:
        return ThreadingHTTPServer((host, port), _make_handler(state))
    except OSError as e:
        raise BindError(f"cannot bind {host}:{port}: {e}") from e


def serve(manifest: SampleManifest, bind_address: str = "127.0.0.1:8791",
          background: bool = False):
    """Run the sample service. With background=True returns the server
    after starting it on a daemon thread (for tests)."""
    host, _, port = bind_address.partition(":")
    srv = make_server(manifest, host, int(port or 8791))
    if background:
        threading.Thread(target=srv.serve_forever, daemon=True).start()
        return srv
    try:
        srv.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        srv.server_close()
    return srv
