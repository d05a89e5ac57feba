"""HTTP binding of the agent API for out-of-process agents.

Endpoints mirror the agent API one to one::

    POST /sessions            {"task": {...}, "packages": [...]?}  -> {"session": id}
    GET  /task_instruction    -> {"instruction": str}
    GET  /screenshot          -> {"screenshot": base64 PNG}
    GET  /view_hierarchy      -> {"view_hierarchy": xml}
    POST /click               {"x", "y"}
    POST /swipe               {"touch_x", "touch_y", "lift_x", "lift_y", "duration"}
    POST /type                {"text"}
    POST /press_home, /press_back, /task_complete, /task_impossible

Every call except ``/sessions`` takes ``?session=<id>``; without it the most
recently created session is used. Posts answer ``{"status": ...}``, and a
terminating post also reports where the recorded trace was written.
Errors answer ``{"error": message}`` with 400 (bad request), 404 (unknown
session or route) or 409 (session already terminated).
"""

from __future__ import annotations

import itertools
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from ..errors import SessionTerminatedError, TouchstoneError
from ..trace import TaskRecord
from .pack import DeviceModel
from .session import Session, record_session


class NotFound(Exception):
    pass


class BadRequest(Exception):
    pass


def _num(body: dict, key: str, default=None):
    v = body.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise BadRequest(f"{key!r} must be a number")
    return v


class AgentEnvService:
    """Hosts independent sessions, each on its own simulated device."""

    def __init__(self, model: DeviceModel, record_dir=None):
        self.model = model
        self.record_dir = None if record_dir is None else Path(record_dir)
        self.sessions: dict[str, Session] = {}
        self.recorded: dict[str, Path] = {}
        self.default: str | None = None
        self._ids = itertools.count(1)
        self._lock = threading.Lock()

    def create_session(self, task: TaskRecord, packages=None) -> str:
        session = Session.simulated(self.model, task, packages)
        with self._lock:
            sid = f"s{next(self._ids)}"
            self.sessions[sid] = session
            self.default = sid
        return sid

    def session(self, sid: str | None) -> tuple[str, Session]:
        sid = sid or self.default
        if sid is None or sid not in self.sessions:
            raise NotFound(f"unknown session {sid!r}")
        return sid, self.sessions[sid]

    def _record(self, sid: str, session: Session) -> str | None:
        if self.record_dir is None:
            return None
        out = self.record_dir / session.task.task_id
        with self._lock:
            n = 1
            while out.exists():
                n += 1
                out = self.record_dir / f"{session.task.task_id}-{n}"
            out.mkdir(parents=True)
        record_session(session, out)
        self.recorded[sid] = out
        return str(out)

    def handle(self, method: str, route: str, sid: str | None, body: dict) -> dict:
        if method == "POST" and route == "/sessions":
            try:
                task = TaskRecord.from_json(body["task"])
            except (KeyError, TypeError) as exc:
                raise BadRequest(f"bad task: {exc}") from None
            return {"session": self.create_session(task, body.get("packages"))}

        sid, s = self.session(sid)
        if method == "GET":
            if route == "/task_instruction":
                return {"instruction": s.get_task_instruction()}
            if route == "/screenshot":
                return {"screenshot": s.get_screenshot_base64()}
            if route == "/view_hierarchy":
                return {"view_hierarchy": s.get_view_hierarchy()}
            raise NotFound(route)
        if method != "POST":
            raise NotFound(route)
        if route == "/click":
            s.post_click(_num(body, "x"), _num(body, "y"))
        elif route == "/swipe":
            s.post_swipe(_num(body, "touch_x"), _num(body, "touch_y"), _num(body, "lift_x"), _num(body, "lift_y"),
                         int(_num(body, "duration", 300)))
        elif route == "/type":
            if not isinstance(body.get("text"), str):
                raise BadRequest("'text' must be a string")
            s.post_type(body["text"])
        elif route == "/press_home":
            s.post_press_home()
        elif route == "/press_back":
            s.post_press_back()
        elif route in ("/task_complete", "/task_impossible"):
            (s.post_task_complete if route == "/task_complete" else s.post_task_impossible)()
            return {"status": s.status.value, "trace": self._record(sid, s)}
        else:
            raise NotFound(route)
        return {"status": s.status.value}


def _handler(service: AgentEnvService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            pass

        def _send(self, code: int, obj: dict) -> None:
            data = json.dumps(obj).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def _dispatch(self, method: str) -> None:
            url = urlsplit(self.path)
            sid = parse_qs(url.query).get("session", [None])[0]
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            try:
                body = json.loads(raw) if raw else {}
                if not isinstance(body, dict):
                    raise BadRequest("body must be a JSON object")
                self._send(200, service.handle(method, url.path, sid, body))
            except NotFound as exc:
                self._send(404, {"error": f"not found: {exc}"})
            except SessionTerminatedError as exc:
                self._send(409, {"error": str(exc)})
            except (BadRequest, json.JSONDecodeError, TouchstoneError, ValueError) as exc:
                self._send(400, {"error": str(exc)})

        def do_GET(self):
            self._dispatch("GET")

        def do_POST(self):
            self._dispatch("POST")

    return Handler


def make_server(service: AgentEnvService, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), _handler(service))
    server.daemon_threads = True
    return server


def serve_in_thread(service: AgentEnvService, host: str = "127.0.0.1", port: int = 0):
    """Start a server on a daemon thread; returns (server, base_url)."""
    server = make_server(service, host, port)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    h, p = server.server_address[:2]
    return server, f"http://{h}:{p}"
