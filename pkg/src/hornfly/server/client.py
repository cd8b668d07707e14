"""The lightweight editor-facing client.

Connects to the daemon (spawning one when absent), sends one check
request, and prints diagnostics in the one-line format editors parse:
path:line:col-line:col severity: message. Exit status: 0 clean, 1 when
any error-severity diagnostic was produced, 2 on protocol/IO trouble.
"""

from __future__ import annotations

import json
import os
import socket
import subprocess
import sys
import time

from .daemon import default_port

SPAWN_TIMEOUT_S = 5.0


class ClientError(Exception):
    pass


def _request(port: int, obj: dict, timeout: float = 60.0) -> dict:
    with socket.create_connection(("127.0.0.1", port), timeout=timeout) as sock:
        f = sock.makefile("rwb")
        f.write(json.dumps(obj).encode() + b"\n")
        f.flush()
        line = f.readline()
    if not line:
        raise ClientError("daemon closed the connection without a response")
    try:
        return json.loads(line)
    except json.JSONDecodeError as e:
        raise ClientError(f"bad response from daemon: {e}") from e


def ping(port: int, timeout: float = 2.0) -> bool:
    try:
        resp = _request(port, {"op": "ping"}, timeout)
        return bool(resp.get("ok"))
    except (OSError, ClientError):
        return False


def spawn_daemon(port: int) -> None:
    cmd = [sys.executable, "-m", "hornfly.server.cli", "daemon", "--port", str(port)]
    subprocess.Popen(
        cmd,
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
        start_new_session=True,
    )


def ensure_daemon(port: int, spawn: bool = True) -> bool:
    if ping(port):
        return True
    if not spawn:
        return False
    spawn_daemon(port)
    deadline = time.monotonic() + SPAWN_TIMEOUT_S
    while time.monotonic() < deadline:
        if ping(port, timeout=0.5):
            return True
        time.sleep(0.1)
    return False


def client_check(
    path: str,
    shadow: str | None = None,
    port: int | None = None,
    root: str | None = None,
    spawn: bool = True,
    domains: tuple[str, ...] | None = None,
    out=sys.stdout,
    err=sys.stderr,
) -> int:
    port = port if port is not None else default_port()
    if not os.path.exists(path) and shadow is None:
        print(f"no such file: {path}", file=err)
        return 2
    if not ensure_daemon(port, spawn):
        print(f"cannot reach a daemon on port {port}", file=err)
        return 2
    req = {"op": "check", "file": os.path.abspath(path)}
    if shadow is not None:
        req["shadow"] = os.path.abspath(shadow)
    if root is not None:
        req["root"] = os.path.abspath(root)
    if domains:
        req["domains"] = list(domains)
    try:
        resp = _request(port, req)
    except (OSError, ClientError) as e:
        print(f"protocol failure: {e}", file=err)
        return 2
    if not resp.get("ok"):
        print(f"daemon error: {resp.get('error')}: {resp.get('detail', '')}", file=err)
        return 2
    worst = 0
    for d in resp.get("diagnostics", []):
        r = d["range"]
        line = (
            f"{d['file']}:{r['start']['line']}:{r['start']['col']}"
            f"-{r['end']['line']}:{r['end']['col']} {d['severity']}: {d['message']}"
        )
        print(line, file=out)
        if d["severity"] == "error":
            worst = 1
    return worst
