"""The background daemon: JSON queries over a localhost socket.

One port serves three wire forms, distinguished by sniffing the first
request line: newline-delimited JSON (the native protocol), HTTP GET for
the playground's static assets, and a WebSocket upgrade at /ws bridging
the same JSON protocol into browsers.

Requests for one workspace root are processed strictly in arrival
order by a per-session worker. A burst of check requests collapses:
queued-but-unstarted checks answer {"error": "superseded"} immediately
and an in-flight one is aborted at the next node-computation boundary
(latest wins).
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import os
import struct
import threading
from dataclasses import dataclass, field

from .. import __version__
from ..checker import CheckerConfig
from ..engine.fixpoint import AnalysisAborted
from .session import Session

DEFAULT_PORT = 7855
WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
STATIC_DIR = os.path.join(os.path.dirname(__file__), "static")

_HTTP_METHODS = (b"GET ", b"POST", b"HEAD", b"OPTI", b"PUT ", b"DELE")


def default_port() -> int:
    env = os.environ.get("HORNFLY_PORT")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_PORT


@dataclass
class _Job:
    request: dict
    future: asyncio.Future
    cancel: threading.Event = field(default_factory=threading.Event)

    @property
    def is_check(self) -> bool:
        return self.request.get("op") == "check"


class SessionActor:
    """Serializes requests for one workspace root; latest check wins."""

    def __init__(self, daemon: "Daemon", root: str):
        self.daemon = daemon
        self.root = root
        self.session: Session | None = None
        self.queue: list[_Job] = []
        self.wake = asyncio.Event()
        self.current: _Job | None = None
        self.task = asyncio.get_running_loop().create_task(self._run())

    def submit(self, request: dict) -> asyncio.Future:
        fut = asyncio.get_running_loop().create_future()
        job = _Job(request, fut)
        if job.is_check:
            for queued in self.queue:
                if job_is_same_target(queued, job):
                    queued.cancel.set()
                    _resolve(queued.future, {"ok": False, "error": "superseded"})
            self.queue = [q for q in self.queue if not q.future.done()]
            if (
                self.current is not None
                and self.current.is_check
                and job_is_same_target(self.current, job)
            ):
                self.current.cancel.set()
        self.queue.append(job)
        self.wake.set()
        return fut

    async def _run(self) -> None:
        loop = asyncio.get_running_loop()
        while True:
            while not self.queue:
                self.wake.clear()
                await self.wake.wait()
            job = self.queue.pop(0)
            if job.future.done():
                continue
            self.current = job
            try:
                response = await loop.run_in_executor(None, self._execute, job)
            except AnalysisAborted:
                response = {"ok": False, "error": "superseded"}
            except Exception as e:  # internal invariant failure: never hang
                response = {"ok": False, "error": "internal", "detail": str(e)}
            finally:
                self.current = None
            _resolve(job.future, response)

    def _execute(self, job: _Job) -> dict:
        req = job.request
        if self.session is None:
            self.session = Session(self.root, self.daemon.config, self.daemon.libdb_path)
        if req.get("op") == "check":
            domains = tuple(req["domains"]) if req.get("domains") else None
            try:
                diags, stats = self.session.check(
                    req["file"],
                    shadow=req.get("shadow"),
                    shadow_inline=req.get("shadowInline"),
                    domains=domains,
                    incremental=req.get("incremental"),
                    should_abort=job.cancel.is_set,
                )
            except AnalysisAborted:
                return {"ok": False, "error": "superseded"}
            except OSError as e:
                return {"ok": False, "error": "io", "path": req.get("file"), "detail": str(e)}
            return {
                "ok": True,
                "diagnostics": [d.to_json() for d in diags],
                "stats": stats,
            }
        if req.get("op") == "annotate":
            from .batch import annotate_file

            try:
                text = annotate_file(self.session, req["file"])
            except OSError as e:
                return {"ok": False, "error": "io", "path": req.get("file"), "detail": str(e)}
            return {"ok": True, "text": text}
        return {"ok": False, "error": "bad-request", "detail": f"unknown op {req.get('op')!r}"}


def job_is_same_target(a: _Job, b: _Job) -> bool:
    return a.request.get("file") == b.request.get("file")


def _resolve(fut: asyncio.Future, value: dict) -> None:
    if not fut.done():
        fut.set_result(value)


class Daemon:
    def __init__(
        self,
        config: CheckerConfig | None = None,
        port: int | None = None,
        host: str = "127.0.0.1",
        assets_dir: str | None = None,
        libdb_path: str | None = None,
    ):
        self.config = config or CheckerConfig()
        self.port = port if port is not None else default_port()
        self.host = host
        self.assets_dir = assets_dir or os.environ.get("HORNFLY_ASSETS") or STATIC_DIR
        self.libdb_path = libdb_path
        self.actors: dict[str, SessionActor] = {}
        self._server: asyncio.AbstractServer | None = None
        self._shutdown: asyncio.Event | None = None  # created in serve()

    # -- request dispatch ---------------------------------------------------

    async def handle_request(self, obj) -> dict:
        if not isinstance(obj, dict) or "op" not in obj:
            return {"ok": False, "error": "bad-request", "detail": "expected {\"op\": ...}"}
        op = obj["op"]
        if op == "ping":
            return {"ok": True, "version": __version__}
        if op == "config":
            return {"ok": True, "config": self.config.to_json()}
        if op == "stats":
            return {
                "ok": True,
                "sessions": [
                    {"root": root, "checksServed": a.session.checks_served if a.session else 0}
                    for root, a in sorted(self.actors.items())
                ],
            }
        if op == "shutdown":
            assert self._shutdown is not None
            self._shutdown.set()
            return {"ok": True}
        if op in ("check", "annotate"):
            file = obj.get("file")
            if not isinstance(file, str) or not file:
                return {"ok": False, "error": "bad-request", "detail": "missing file"}
            root = obj.get("root") or os.path.dirname(os.path.abspath(file)) or "."
            root = os.path.abspath(root)
            actor = self.actors.get(root)
            if actor is None:
                actor = SessionActor(self, root)
                self.actors[root] = actor
            return await actor.submit(obj)
        return {"ok": False, "error": "bad-request", "detail": f"unknown op {op!r}"}

    # -- serving --------------------------------------------------------------

    async def serve(self) -> None:
        self._shutdown = asyncio.Event()
        self._server = await asyncio.start_server(self._on_connect, self.host, self.port)
        async with self._server:
            await self._shutdown.wait()

    def run(self) -> None:
        asyncio.run(self.serve())

    async def _on_connect(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        try:
            first = await reader.readline()
            if not first:
                return
            if any(first.startswith(m) for m in _HTTP_METHODS):
                await self._http(first, reader, writer)
            else:
                await self._ndjson(first, reader, writer)
        except (ConnectionResetError, asyncio.IncompleteReadError):
            pass
        finally:
            try:
                writer.close()
                await writer.wait_closed()
            except (ConnectionResetError, OSError):
                pass

    # -- newline-delimited JSON ------------------------------------------------

    async def _ndjson(self, first: bytes, reader, writer) -> None:
        line = first
        while line:
            text = line.decode("utf-8", "replace").strip()
            if text:
                try:
                    obj = json.loads(text)
                except json.JSONDecodeError as e:
                    response = {"ok": False, "error": "bad-request", "detail": str(e)}
                else:
                    response = await self.handle_request(obj)
                writer.write(json.dumps(response).encode() + b"\n")
                await writer.drain()
                if self._shutdown is not None and self._shutdown.is_set():
                    break
            line = await reader.readline()

    # -- HTTP + WebSocket ---------------------------------------------------------

    async def _http(self, first: bytes, reader, writer) -> None:
        try:
            method, path, _version = first.decode("latin-1").split(" ", 2)
        except ValueError:
            writer.write(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            return
        headers: dict[str, str] = {}
        while True:
            line = await reader.readline()
            if line in (b"\r\n", b"\n", b""):
                break
            if b":" in line:
                k, v = line.decode("latin-1").split(":", 1)
                headers[k.strip().lower()] = v.strip()

        if path.split("?")[0] == "/ws" and headers.get("upgrade", "").lower() == "websocket":
            await self._websocket(headers, reader, writer)
            return
        if method != "GET":
            writer.write(b"HTTP/1.1 405 Method Not Allowed\r\n\r\n")
            return
        self._serve_static(path.split("?")[0], writer)

    def _serve_static(self, path: str, writer) -> None:
        rel = path.lstrip("/") or "index.html"
        base = os.path.abspath(self.assets_dir)
        full = os.path.abspath(os.path.normpath(os.path.join(base, rel)))
        if os.path.commonpath([full, base]) != base:
            writer.write(b"HTTP/1.1 403 Forbidden\r\n\r\n")
            return
        if not os.path.isfile(full):
            writer.write(b"HTTP/1.1 404 Not Found\r\ncontent-length: 9\r\n\r\nnot found")
            return
        ctype = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript; charset=utf-8",
            ".mjs": "text/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
            ".json": "application/json",
            ".map": "application/json",
        }.get(os.path.splitext(full)[1], "application/octet-stream")
        with open(full, "rb") as f:
            body = f.read()
        head = (
            f"HTTP/1.1 200 OK\r\ncontent-type: {ctype}\r\n"
            f"content-length: {len(body)}\r\ncache-control: no-cache\r\n\r\n"
        )
        writer.write(head.encode() + body)

    async def _websocket(self, headers, reader, writer) -> None:
        key = headers.get("sec-websocket-key", "")
        accept = base64.b64encode(hashlib.sha1((key + WS_GUID).encode()).digest()).decode()
        writer.write(
            (
                "HTTP/1.1 101 Switching Protocols\r\n"
                "upgrade: websocket\r\nconnection: Upgrade\r\n"
                f"sec-websocket-accept: {accept}\r\n\r\n"
            ).encode()
        )
        await writer.drain()
        while True:
            msg = await _ws_read_message(reader)
            if msg is None:
                return
            opcode, payload = msg
            if opcode == 8:  # close
                writer.write(_ws_frame(8, b""))
                await writer.drain()
                return
            if opcode == 9:  # ping
                writer.write(_ws_frame(10, payload))
                await writer.drain()
                continue
            if opcode not in (1, 2):
                continue
            try:
                obj = json.loads(payload.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError) as e:
                response = {"ok": False, "error": "bad-request", "detail": str(e)}
            else:
                response = await self.handle_request(obj)
                if isinstance(obj, dict) and "id" in obj and isinstance(response, dict):
                    response = {**response, "id": obj["id"]}
            writer.write(_ws_frame(1, json.dumps(response).encode()))
            await writer.drain()
            if self._shutdown is not None and self._shutdown.is_set():
                return


async def _ws_read_message(reader) -> tuple[int, bytes] | None:
    """One complete message (handling continuation frames)."""
    opcode = None
    buf = b""
    while True:
        try:
            head = await reader.readexactly(2)
        except asyncio.IncompleteReadError:
            return None
        fin = head[0] & 0x80
        op = head[0] & 0x0F
        masked = head[1] & 0x80
        length = head[1] & 0x7F
        if length == 126:
            length = struct.unpack(">H", await reader.readexactly(2))[0]
        elif length == 127:
            length = struct.unpack(">Q", await reader.readexactly(8))[0]
        mask = await reader.readexactly(4) if masked else b""
        payload = await reader.readexactly(length) if length else b""
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        if op in (8, 9, 10):
            return op, payload
        if opcode is None:
            opcode = op
        buf += payload
        if fin:
            return opcode, buf


def _ws_frame(opcode: int, payload: bytes) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head += bytes([n])
    elif n < 65536:
        head += bytes([126]) + struct.pack(">H", n)
    else:
        head += bytes([127]) + struct.pack(">Q", n)
    return head + payload
